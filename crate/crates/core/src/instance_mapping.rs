//! Mappings between secure index-coding and secure network-coding instances.
//!
//! Index to network: every message `i` gets a source vertex `s<i>` and every
//! receiver `j` a sink vertex `t<j>` (both 1-based and positional). All sources
//! feed vertex `1`, the single edge `1->2` carries the broadcast, and vertex `2`
//! forwards it to every sink. Side information becomes direct edges `s<i>->t<j>`.
//!
//! Network to index: every message and every edge of an augmented instance
//! becomes an index message. One receiver per destination vertex decodes its
//! demands, and one receiver per edge decodes that edge's value.

use crate::error::{Error, Result};
use crate::index_model::{IndexEavesdropper, IndexInstance, Message, Receiver};
use crate::network_model::{
    AugmentedInstance, Capacity, Edge, NetworkEavesdropper, NetworkInstance, NetworkMessage,
};
use crate::probinfo::Pmf;

/// Vertex id of the vertex collecting all sources.
pub const HUB: &str = "1";
/// Vertex id of the vertex forwarding the broadcast.
pub const RELAY: &str = "2";

/// Id of the index message standing for edge `edge_id`.
pub fn edge_message_id(edge_id: &str) -> String {
    format!("edge:{edge_id}")
}

/// `⌈log2 m⌉`.
pub fn ceil_log2(m: usize) -> u32 {
    match m {
        0 | 1 => 0,
        _ => usize::BITS - (m - 1).leading_zeros(),
    }
}

/// Smallest capacity whose edge alphabet holds `alphabet` symbols over `uses`.
pub fn source_capacity(alphabet: usize, uses: u32) -> Capacity {
    Capacity::new(ceil_log2(alphabet) as u64, uses as u64)
}

/// Positions of the parts of an index-to-network image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct I2nLayout {
    /// Vertex `s_i` per message.
    pub sources: Vec<usize>,
    /// Vertex `t_j` per receiver.
    pub sinks: Vec<usize>,
    pub hub: usize,
    pub relay: usize,
    /// Edge `s_i -> 1` per message.
    pub source_edges: Vec<usize>,
    /// Per receiver, `(message, edge s_i -> t_j)` for every side message, ascending.
    pub side_edges: Vec<Vec<(usize, usize)>>,
    /// Edge `1 -> 2`.
    pub bottleneck: usize,
    /// Edge `2 -> t_j` per receiver.
    pub relay_edges: Vec<usize>,
}

impl I2nLayout {
    fn of(index: &IndexInstance) -> Self {
        let k = index.messages().len();
        let l = index.receivers().len();
        let mut next = k;
        let mut side_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); l];
        for i in 0..k {
            for (j, t) in index.receivers().iter().enumerate() {
                if t.has.contains(&i) {
                    side_edges[j].push((i, next));
                    next += 1;
                }
            }
        }
        Self {
            sources: (0..k).collect(),
            sinks: (k..k + l).collect(),
            hub: k + l,
            relay: k + l + 1,
            source_edges: (0..k).collect(),
            side_edges,
            bottleneck: next,
            relay_edges: (next + 1..next + 1 + l).collect(),
        }
    }
}

/// The image with unit-capacity broadcast edges at one channel use.
pub fn index_to_network(index: &IndexInstance) -> Result<NetworkInstance> {
    index_to_network_with(index, 1, Capacity::from_integer(1))
}

/// The image over `uses` channel uses with the given capacity on `1->2` and
/// every `2->t_j`. Source edges get [`source_capacity`].
pub fn index_to_network_with(
    index: &IndexInstance,
    uses: u32,
    bottleneck: Capacity,
) -> Result<NetworkInstance> {
    if uses == 0 {
        return Err(Error::InvalidInstance("zero channel uses".into()));
    }
    let lay = I2nLayout::of(index);
    let msgs = index.messages();
    let mut vertices: Vec<String> = (1..=msgs.len()).map(|i| format!("s{i}")).collect();
    vertices.extend((1..=index.receivers().len()).map(|j| format!("t{j}")));
    vertices.push(HUB.into());
    vertices.push(RELAY.into());
    let cap = |i: usize| source_capacity(msgs[i].alphabet, uses);
    let mut edges: Vec<Edge> = (0..msgs.len())
        .map(|i| Edge {
            tail: lay.sources[i],
            head: lay.hub,
            label: 0,
            capacity: cap(i),
        })
        .collect();
    let mut side: Vec<(usize, usize, usize)> = lay
        .side_edges
        .iter()
        .enumerate()
        .flat_map(|(j, v)| v.iter().map(move |&(i, e)| (e, i, j)))
        .collect();
    side.sort_unstable();
    edges.extend(side.into_iter().map(|(_, i, j)| Edge {
        tail: lay.sources[i],
        head: lay.sinks[j],
        label: 0,
        capacity: cap(i),
    }));
    edges.push(Edge {
        tail: lay.hub,
        head: lay.relay,
        label: 0,
        capacity: bottleneck,
    });
    edges.extend(lay.sinks.iter().map(|&t| Edge {
        tail: lay.relay,
        head: t,
        label: 0,
        capacity: bottleneck,
    }));
    let messages = msgs
        .iter()
        .enumerate()
        .map(|(i, m)| NetworkMessage {
            id: m.id.clone(),
            alphabet: m.alphabet,
            origin: lay.sources[i],
            destinations: index
                .receivers()
                .iter()
                .enumerate()
                .filter(|(_, t)| t.wants.contains(&i))
                .map(|(j, _)| lay.sinks[j])
                .collect(),
        })
        .collect();
    let eavesdroppers = index
        .eavesdroppers()
        .iter()
        .map(|r| {
            let mut taps = vec![lay.bottleneck];
            for &i in &r.side_info {
                taps.push(lay.source_edges[i]);
                taps.extend(
                    lay.side_edges
                        .iter()
                        .flatten()
                        .filter(|&&(m, _)| m == i)
                        .map(|&(_, e)| e),
                );
            }
            NetworkEavesdropper {
                id: r.id.clone(),
                targets: r.targets.clone(),
                taps,
            }
        })
        .collect();
    NetworkInstance::new(vertices, edges, messages, eavesdroppers)
}

/// Checks that `network` is the image of `index` up to edge capacities and
/// returns the positions of its parts.
pub fn i2n_layout(index: &IndexInstance, network: &NetworkInstance) -> Result<I2nLayout> {
    let expected = index_to_network(index)?;
    let same_edges = expected.edges().len() == network.edges().len()
        && expected
            .edges()
            .iter()
            .zip(network.edges())
            .all(|(a, b)| (a.tail, a.head, a.label) == (b.tail, b.head, b.label));
    if expected.vertices() != network.vertices()
        || !same_edges
        || expected.messages() != network.messages()
        || expected.eavesdroppers() != network.eavesdroppers()
    {
        return Err(Error::InstanceMismatch(
            "network is not the image of the index instance".into(),
        ));
    }
    Ok(I2nLayout::of(index))
}

/// An index instance produced from an augmented network instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexImage {
    instance: IndexInstance,
    uses: u32,
    broadcast_bits: u32,
    source_count: usize,
    edge_bits: Vec<u32>,
    destinations: Vec<usize>,
}

impl IndexImage {
    pub fn instance(&self) -> &IndexInstance {
        &self.instance
    }

    pub fn uses(&self) -> u32 {
        self.uses
    }

    /// `n̂ = Σ_e ⌊c_e n⌋`.
    pub fn broadcast_bits(&self) -> u32 {
        self.broadcast_bits
    }

    /// Number of network messages; they occupy the first index positions.
    pub fn source_count(&self) -> usize {
        self.source_count
    }

    /// Index of the message standing for edge `e`.
    pub fn edge_message(&self, e: usize) -> usize {
        self.source_count + e
    }

    pub fn edge_bits(&self) -> &[u32] {
        &self.edge_bits
    }

    /// Destination vertices, one receiver each, ahead of the edge receivers.
    pub fn destinations(&self) -> &[usize] {
        &self.destinations
    }

    /// Receiver index of edge `e`.
    pub fn edge_receiver(&self, e: usize) -> usize {
        self.destinations.len() + e
    }

    /// `|X_{S'}|` over the source messages.
    pub fn source_alphabet(&self) -> u64 {
        self.instance.messages()[..self.source_count]
            .iter()
            .map(|m| m.alphabet as u64)
            .product()
    }
}

/// Maps an augmented instance over `uses` channel uses.
pub fn network_to_index(aug: &AugmentedInstance, uses: u32) -> Result<IndexImage> {
    if uses == 0 {
        return Err(Error::InvalidInstance("zero channel uses".into()));
    }
    let n = aug.instance();
    for (s, m) in n.messages().iter().enumerate() {
        if m.destinations.is_empty() && !aug.is_key_message(s) {
            return Err(Error::InvalidInstance(format!(
                "message `{}` has no destination",
                m.id
            )));
        }
    }
    let ns = n.messages().len();
    let mut edge_bits = Vec::with_capacity(n.edges().len());
    let mut total: u64 = 0;
    for e in 0..n.edges().len() {
        n.edge_alphabet(e, uses)?;
        let b = n.edge_bits(e, uses);
        total += b;
        edge_bits.push(b as u32);
    }
    if total > crate::index_model::MAX_BROADCAST_BITS as u64 {
        return Err(Error::InvalidInstance(format!(
            "broadcast of {total} bits exceeds {} bits",
            crate::index_model::MAX_BROADCAST_BITS
        )));
    }
    let mut messages: Vec<Message> = n
        .messages()
        .iter()
        .map(|m| Message::new(m.id.clone(), m.alphabet))
        .collect();
    for (e, &bits) in edge_bits.iter().enumerate() {
        messages.push(Message::new(edge_message_id(&n.edge_id(e)), 1usize << bits));
    }
    let known = |v: usize| -> Vec<usize> {
        let mut h = n.origin_messages(v);
        h.extend(n.in_edges(v).into_iter().map(|e| ns + e));
        h
    };
    let destinations = n.destinations();
    let mut receivers: Vec<Receiver> = destinations
        .iter()
        .map(|&v| Receiver {
            id: format!("t:{}", n.vertices()[v]),
            wants: n.demanded_at(v),
            has: known(v),
        })
        .collect();
    receivers.extend((0..n.edges().len()).map(|e| Receiver {
        id: format!("t:{}", n.edge_id(e)),
        wants: vec![ns + e],
        has: known(n.edges()[e].tail),
    }));
    let eavesdroppers = n
        .eavesdroppers()
        .iter()
        .map(|r| IndexEavesdropper {
            id: r.id.clone(),
            targets: r.targets.clone(),
            side_info: r.taps.iter().map(|&e| ns + e).collect(),
        })
        .collect();
    Ok(IndexImage {
        instance: IndexInstance::new(messages, receivers, eavesdroppers)?,
        uses,
        broadcast_bits: total as u32,
        source_count: ns,
        edge_bits,
        destinations,
    })
}

/// Index-side pmfs: the network message pmfs followed by uniform edge messages.
pub fn image_pmfs(image: &IndexImage, network_pmfs: &[Pmf]) -> Result<Vec<Pmf>> {
    if network_pmfs.len() != image.source_count {
        return Err(Error::InvalidPmf(format!(
            "{} pmfs for {} network messages",
            network_pmfs.len(),
            image.source_count
        )));
    }
    let mut out = network_pmfs.to_vec();
    for &b in &image.edge_bits {
        out.push(Pmf::uniform(1usize << b)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network_model::augment;
    use crate::network_model::NetworkCode;

    pub(crate) fn fig1() -> IndexInstance {
        let msgs = (1..=4).map(|i| Message::new(i.to_string(), 2)).collect();
        let rx = |id: &str, w: &[usize], h: &[usize]| Receiver {
            id: id.into(),
            wants: w.to_vec(),
            has: h.to_vec(),
        };
        IndexInstance::new(
            msgs,
            vec![rx("t1", &[0], &[1]), rx("t2", &[1, 3], &[2]), rx("t3", &[2], &[0, 3])],
            vec![IndexEavesdropper {
                id: "r".into(),
                targets: vec![1],
                side_info: vec![3],
            }],
        )
        .unwrap()
    }

    #[test]
    fn fig1_image_structure() {
        let n = index_to_network(&fig1()).unwrap();
        assert_eq!(n.vertices().len(), 9);
        assert_eq!(n.edges().len(), 12);
        let taps: Vec<String> = n.eavesdroppers()[0].taps.iter().map(|&e| n.edge_id(e)).collect();
        assert_eq!(taps, ["s4->1#0", "s4->t3#0", "1->2#0"]);
        assert_eq!(n.eavesdroppers()[0].targets, vec![1]);
        // Only vertex 1 collects every source, through the single edge 1->2.
        let hub = n.vertex_index(HUB).unwrap();
        assert_eq!(n.in_edges(hub).len(), 4);
        assert_eq!(n.out_edges(hub).len(), 1);
        // Structural identities between the two instances.
        let idx = fig1();
        for (j, t) in idx.receivers().iter().enumerate() {
            let tv = n.vertex_index(&format!("t{}", j + 1)).unwrap();
            let wants: Vec<usize> = (0..4).filter(|&i| n.messages()[i].destinations.contains(&tv)).collect();
            assert_eq!(wants, t.wants);
            let has: Vec<usize> = (0..4)
                .filter(|&i| n.in_edges(tv).iter().any(|&e| n.edges()[e].tail == i))
                .collect();
            assert_eq!(has, t.has);
        }
    }

    #[test]
    fn smallest_image() {
        let idx = IndexInstance::new(
            vec![Message::new("1", 2)],
            vec![Receiver {
                id: "t".into(),
                wants: vec![0],
                has: vec![],
            }],
            vec![IndexEavesdropper {
                id: "r".into(),
                targets: vec![0],
                side_info: vec![],
            }],
        )
        .unwrap();
        let n = index_to_network(&idx).unwrap();
        assert_eq!(n.vertices().len(), 4);
        let ids: Vec<String> = (0..n.edges().len()).map(|e| n.edge_id(e)).collect();
        assert_eq!(ids, ["s1->1#0", "1->2#0", "2->t1#0"]);
        assert_eq!(n.eavesdroppers()[0].taps, vec![1]);
        assert!(i2n_layout(&idx, &n).is_ok());
        assert!(i2n_layout(&fig1(), &n).is_err());
    }

    #[test]
    fn source_capacity_fits_alphabet() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(source_capacity(5, 2), Capacity::new(3, 2));
    }

    fn fig2a() -> (NetworkInstance, NetworkCode) {
        let n = NetworkInstance::new(
            vec!["1".into(), "2".into()],
            (0..2)
                .map(|k| Edge {
                    tail: 0,
                    head: 1,
                    label: k,
                    capacity: Capacity::from_integer(1),
                })
                .collect(),
            vec![NetworkMessage {
                id: "1".into(),
                alphabet: 2,
                origin: 0,
                destinations: vec![1],
            }],
            vec![
                NetworkEavesdropper {
                    id: "r1".into(),
                    targets: vec![0],
                    taps: vec![0],
                },
                NetworkEavesdropper {
                    id: "r2".into(),
                    targets: vec![0],
                    taps: vec![1],
                },
            ],
        )
        .unwrap();
        let code = NetworkCode::from_fns(
            &n,
            1,
            vec![Pmf::uniform(2).unwrap(), Pmf::uniform(1).unwrap()],
            |e, _, x, z| if e == 0 { x[0] ^ z } else { z },
            |_, ins, _| vec![ins[0] ^ ins[1]],
        )
        .unwrap();
        (n, code)
    }

    #[test]
    fn fig2_image_structure() {
        let (n, code) = fig2a();
        let (aug, _) = augment(&n, &code).unwrap();
        let img = network_to_index(&aug, 1).unwrap();
        let idx = img.instance();
        let ids: Vec<&str> = idx.messages().iter().map(|m| m.id.as_str()).collect();
        assert_eq!(ids, ["1", "key:1", "key:2", "edge:1->2#0", "edge:1->2#1"]);
        assert_eq!(idx.messages()[2].alphabet, 1);
        let rx: Vec<&str> = idx.receivers().iter().map(|r| r.id.as_str()).collect();
        assert_eq!(rx, ["t:2", "t:1->2#0", "t:1->2#1"]);
        assert_eq!(idx.receivers()[0].has, vec![2, 3, 4]);
        assert_eq!(idx.receivers()[0].wants, vec![0]);
        assert_eq!(idx.receivers()[1].has, vec![0, 1]);
        assert_eq!(idx.eavesdroppers()[0].side_info, vec![3]);
        assert_eq!(idx.eavesdroppers()[0].targets, vec![0]);
        assert_eq!(img.broadcast_bits(), 2);
        assert_eq!(idx.receivers().len(), n.destinations().len() + n.edges().len());
        assert_eq!(idx.eavesdroppers().len(), n.eavesdroppers().len());
    }

    #[test]
    fn broadcast_length_sums_floors() {
        let n = NetworkInstance::new(
            vec!["u".into(), "v".into()],
            vec![
                Edge {
                    tail: 0,
                    head: 1,
                    label: 0,
                    capacity: Capacity::new(3, 2),
                },
                Edge {
                    tail: 0,
                    head: 1,
                    label: 1,
                    capacity: Capacity::new(7, 10),
                },
            ],
            vec![NetworkMessage {
                id: "m".into(),
                alphabet: 2,
                origin: 0,
                destinations: vec![1],
            }],
            vec![],
        )
        .unwrap();
        let det = NetworkCode::from_fns(&n, 2, vec![Pmf::uniform(1).unwrap(); 2], |_, _, x, _| x[0], |_, i, _| vec![i[0] & 1])
            .unwrap();
        let (aug, _) = augment(&n, &det).unwrap();
        assert_eq!(network_to_index(&aug, 2).unwrap().broadcast_bits(), 4);
        let single = NetworkInstance::new(
            vec!["u".into(), "v".into()],
            vec![Edge {
                tail: 0,
                head: 1,
                label: 0,
                capacity: Capacity::from_integer(1),
            }],
            n.messages().to_vec(),
            vec![],
        )
        .unwrap();
        let det = NetworkCode::from_fns(&single, 1, vec![Pmf::uniform(1).unwrap(); 2], |_, _, x, _| x[0], |_, i, _| vec![i[0]])
            .unwrap();
        let (aug, _) = augment(&single, &det).unwrap();
        let img = network_to_index(&aug, 1).unwrap();
        assert_eq!(img.instance().receivers().len(), 2);
        assert_eq!(img.broadcast_bits(), 1);
    }

    #[test]
    fn undemanded_message_is_rejected() {
        let (n, code) = fig2a();
        let mut msgs = n.messages().to_vec();
        msgs[0].destinations.clear();
        let bare = NetworkInstance::new(n.vertices().to_vec(), n.edges().to_vec(), msgs, n.eavesdroppers().to_vec()).unwrap();
        let code = NetworkCode::new(
            &bare,
            1,
            code.keys().to_vec(),
            code.encoders().to_vec(),
            vec![None, None],
        )
        .unwrap();
        let (aug, _) = augment(&bare, &code).unwrap();
        assert!(network_to_index(&aug, 1).unwrap_err().to_string().contains("no destination"));
    }
}

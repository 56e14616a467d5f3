//! Small reference instances and codes used by the tests and the CLI.

use crate::index_model::{IndexCode, IndexEavesdropper, IndexInstance, Message, Receiver};
use crate::network_model::{Capacity, Edge, NetworkCode, NetworkEavesdropper, NetworkInstance, NetworkMessage};
use crate::probinfo::Pmf;

/// Four binary messages, three receivers and one eavesdropper:
/// `t1` wants `1` knowing `2`; `t2` wants `2, 4` knowing `3`; `t3` wants `3`
/// knowing `1, 4`. Eavesdropper `r` targets `2` knowing `4`.
pub fn fig1_index() -> IndexInstance {
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
    .expect("valid instance")
}

fn bits3(c: [u32; 3]) -> u32 {
    c[0] << 2 | c[1] << 1 | c[2]
}

fn split3(b: u32) -> [u32; 3] {
    [b >> 2 & 1, b >> 1 & 1, b & 1]
}

/// `(x1⊕x2, x3⊕x4, x2⊕x3)`: zero error, but `r` learns `x2` from `x4`.
pub fn fig1_example_code(index: &IndexInstance) -> IndexCode {
    IndexCode::from_fns(
        index,
        3,
        Pmf::uniform(1).expect("unit pmf"),
        |x, _| bits3([x[0] ^ x[1], x[2] ^ x[3], x[1] ^ x[2]]),
        |j, b, h| {
            let c = split3(b);
            match j {
                0 => vec![c[0] ^ h[0]],
                1 => vec![c[2] ^ h[0], c[1] ^ h[0]],
                _ => vec![c[1] ^ h[1]],
            }
        },
    )
    .expect("valid code")
}

/// `(x1⊕x2, x2⊕x3, x1⊕x3⊕x4)`: zero error and no leakage to `r`.
pub fn fig1_secure_code(index: &IndexInstance) -> IndexCode {
    IndexCode::from_fns(
        index,
        3,
        Pmf::uniform(1).expect("unit pmf"),
        |x, _| bits3([x[0] ^ x[1], x[1] ^ x[2], x[0] ^ x[2] ^ x[3]]),
        |j, b, h| {
            let c = split3(b);
            match j {
                0 => vec![c[0] ^ h[0]],
                1 => vec![c[1] ^ h[0], c[0] ^ c[1] ^ c[2]],
                _ => vec![c[2] ^ h[0] ^ h[1]],
            }
        },
    )
    .expect("valid code")
}

/// Two unit-capacity parallel edges `1->2`, one binary message from `1` to
/// `2`, and one eavesdropper per edge, each targeting the message.
pub fn fig2a_instance() -> NetworkInstance {
    let edge = |label| Edge {
        tail: 0,
        head: 1,
        label,
        capacity: Capacity::from_integer(1),
    };
    let tap = |id: &str, e| NetworkEavesdropper {
        id: id.into(),
        targets: vec![0],
        taps: vec![e],
    };
    NetworkInstance::new(
        vec!["1".into(), "2".into()],
        vec![edge(0), edge(1)],
        vec![NetworkMessage {
            id: "1".into(),
            alphabet: 2,
            origin: 0,
            destinations: vec![1],
        }],
        vec![tap("r1", 0), tap("r2", 1)],
    )
    .expect("valid instance")
}

/// One-time pad on [`fig2a_instance`]: `e1 = x ⊕ z`, `e2 = z` with a uniform
/// key bit at `1`; vertex `2` XORs its inputs.
pub fn fig2a_code(n: &NetworkInstance) -> NetworkCode {
    NetworkCode::from_fns(
        n,
        1,
        vec![Pmf::uniform(2).expect("pmf"), Pmf::uniform(1).expect("unit pmf")],
        |e, _, x, z| if e == 0 { x[0] ^ z } else { z },
        |_, ins, _| vec![ins[0] ^ ins[1]],
    )
    .expect("valid code")
}

pub fn fig2a() -> (NetworkInstance, NetworkCode) {
    let n = fig2a_instance();
    let c = fig2a_code(&n);
    (n, c)
}

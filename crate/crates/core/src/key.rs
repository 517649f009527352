//! Canonical keys: a byte encoding of nested lists, multisets, integers and
//! labels in which two structures encode equally iff they match.
//!
//! Every node is tagged and self-delimiting (fixed width or count-prefixed),
//! so concatenations never collide. Multiset children are sorted by their
//! own encodings before being written, which makes the encoding blind to
//! element order. Deeply nested structures embed children as SHA-256
//! digests to keep keys short; [`Digest`] is that 32-byte form.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use serde::{Deserialize, Serialize, Serializer};
use sha2::{Digest as _, Sha256};
use thiserror::Error;

const TAG_INT: u8 = b'I';
const TAG_LABEL: u8 = b'L';
const TAG_ABSENT: u8 = b'N';
const TAG_LIST: u8 = b'A';
const TAG_MULTISET: u8 = b'M';
const TAG_DIGEST: u8 = b'D';

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn digest(&self) -> Digest {
        Digest(Sha256::digest(&self.0).into())
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

/// SHA-256 of a canonical key.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// First eight bytes, for hashing into small integer colors.
    pub fn prefix_u64(&self) -> u64 {
        u64::from_be_bytes(self.0[..8].try_into().unwrap())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({}…)", &self.to_hex()[..12])
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let bytes = hex::decode(&s).map_err(serde::de::Error::custom)?;
        let arr: [u8; 32] = bytes
            .try_into()
            .map_err(|_| serde::de::Error::custom("digest must be 32 bytes"))?;
        Ok(Digest(arr))
    }
}

/// Interned label token. Equal iff the structured keys they were interned
/// from are equal (within one [`LabelTable`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub u32);

/// Structure to be encoded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KeyNode {
    Int(u64),
    Label(Label),
    Absent,
    List(Vec<KeyNode>),
    Multiset(Vec<KeyNode>),
    Digest(Digest),
}

impl KeyNode {
    pub fn ints(values: impl IntoIterator<Item = usize>) -> KeyNode {
        KeyNode::Multiset(values.into_iter().map(|v| KeyNode::Int(v as u64)).collect())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            KeyNode::Int(_) => "int",
            KeyNode::Label(_) => "label",
            KeyNode::Absent => "absent",
            KeyNode::List(_) => "list",
            KeyNode::Multiset(_) => "multiset",
            KeyNode::Digest(_) => "digest",
        }
    }

    pub fn encode(&self) -> CanonicalKey {
        let mut out = Vec::new();
        self.write(&mut out);
        CanonicalKey(out)
    }

    fn write(&self, out: &mut Vec<u8>) {
        match self {
            KeyNode::Int(v) => {
                out.push(TAG_INT);
                out.extend_from_slice(&v.to_be_bytes());
            }
            KeyNode::Label(l) => {
                out.push(TAG_LABEL);
                out.extend_from_slice(&l.0.to_be_bytes());
            }
            KeyNode::Absent => out.push(TAG_ABSENT),
            KeyNode::List(items) => {
                out.push(TAG_LIST);
                out.extend_from_slice(&(items.len() as u32).to_be_bytes());
                for item in items {
                    item.write(out);
                }
            }
            KeyNode::Multiset(items) => {
                out.push(TAG_MULTISET);
                out.extend_from_slice(&(items.len() as u32).to_be_bytes());
                let mut encoded: Vec<Vec<u8>> = items
                    .iter()
                    .map(|item| {
                        let mut buf = Vec::new();
                        item.write(&mut buf);
                        buf
                    })
                    .collect();
                encoded.sort_unstable();
                for e in encoded {
                    out.extend_from_slice(&e);
                }
            }
            KeyNode::Digest(d) => {
                out.push(TAG_DIGEST);
                out.extend_from_slice(&d.0);
            }
        }
    }
}

/// Anything with a canonical key.
pub trait Canonical {
    fn key_node(&self) -> KeyNode;

    fn canonical_key(&self) -> CanonicalKey {
        self.key_node().encode()
    }

    fn digest(&self) -> Digest {
        self.canonical_key().digest()
    }
}

impl Canonical for KeyNode {
    fn key_node(&self) -> KeyNode {
        self.clone()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot match a {left} against a {right}")]
pub struct KindMismatch {
    pub left: &'static str,
    pub right: &'static str,
}

/// Multiset-aware structural equality.
pub fn matches(a: &KeyNode, b: &KeyNode) -> Result<bool, KindMismatch> {
    if a.kind() != b.kind() {
        return Err(KindMismatch {
            left: a.kind(),
            right: b.kind(),
        });
    }
    Ok(a.encode() == b.encode())
}

/// Thread-safe intern table from structured keys to [`Label`] tokens.
/// Tokens are assigned in first-insertion order.
#[derive(Debug, Default)]
pub struct LabelTable {
    inner: RwLock<Interned>,
}

#[derive(Debug, Default)]
struct Interned {
    index: HashMap<CanonicalKey, u32>,
    keys: Vec<CanonicalKey>,
}

impl LabelTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&self, key: &KeyNode) -> Label {
        self.intern_key(key.encode())
    }

    pub fn intern_key(&self, key: CanonicalKey) -> Label {
        if let Some(&id) = self.inner.read().expect("label table poisoned").index.get(&key) {
            return Label(id);
        }
        let mut w = self.inner.write().expect("label table poisoned");
        if let Some(&id) = w.index.get(&key) {
            return Label(id);
        }
        let id = w.keys.len() as u32;
        w.keys.push(key.clone());
        w.index.insert(key, id);
        Label(id)
    }

    pub fn key_of(&self, label: Label) -> Option<CanonicalKey> {
        self.inner.read().expect("label table poisoned").keys.get(label.0 as usize).cloned()
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("label table poisoned").keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(v: &[usize]) -> KeyNode {
        KeyNode::ints(v.iter().copied())
    }

    fn tom(entries: &[(&[usize], &[usize])]) -> KeyNode {
        KeyNode::List(entries.iter().map(|(a, b)| KeyNode::List(vec![ms(a), ms(b)])).collect())
    }

    #[test]
    fn flat_multisets() {
        assert!(matches(&ms(&[3, 7, 3, 2, 1]), &ms(&[1, 2, 3, 3, 7])).unwrap());
        assert!(!matches(&ms(&[3, 7, 3, 2, 1]), &ms(&[3, 7, 2, 1, 4])).unwrap());
    }

    #[test]
    fn nested_multisets() {
        let a = KeyNode::Multiset(vec![ms(&[5, 3, 3]), ms(&[5, 2, 2, 8]), ms(&[1, 4, 2]), ms(&[1, 3, 3])]);
        let b = KeyNode::Multiset(vec![ms(&[1, 2, 4]), ms(&[1, 3, 3]), ms(&[2, 2, 5, 8]), ms(&[3, 3, 5])]);
        let c = KeyNode::Multiset(vec![ms(&[5, 3, 3]), ms(&[1, 3, 4]), ms(&[5, 2, 2, 2]), ms(&[1, 4, 2])]);
        assert!(matches(&a, &b).unwrap());
        assert!(!matches(&a, &c).unwrap());
    }

    #[test]
    fn tomography_lists_are_ordered() {
        let a = tom(&[(&[5, 3, 3], &[5, 2, 2, 8]), (&[1, 4, 2], &[1, 3, 3]), (&[7, 5], &[3, 3])]);
        let b = tom(&[(&[3, 3, 5], &[2, 2, 5, 8]), (&[1, 2, 4], &[1, 3, 3]), (&[5, 7], &[3, 3])]);
        let c = tom(&[(&[3, 3, 5], &[2, 2, 5, 8]), (&[1, 3, 3], &[1, 2, 4]), (&[5, 7], &[3, 3])]);
        assert!(matches(&a, &b).unwrap());
        assert!(!matches(&a, &c).unwrap());
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        assert!(matches(&ms(&[1]), &KeyNode::List(vec![KeyNode::Int(1)])).is_err());
    }

    #[test]
    fn empty_and_distinct_encodings() {
        assert_eq!(ms(&[]).encode().as_bytes(), &[TAG_MULTISET, 0, 0, 0, 0]);
        assert_ne!(ms(&[1, 2]).encode(), ms(&[1, 1]).encode());
        // a list of two ints is not a list of one list
        let flat = KeyNode::List(vec![KeyNode::Int(1), KeyNode::Int(2)]);
        let nested = KeyNode::List(vec![KeyNode::List(vec![KeyNode::Int(1), KeyNode::Int(2)])]);
        assert_ne!(flat.encode(), nested.encode());
    }

    #[test]
    fn interning_is_stable() {
        let t = LabelTable::new();
        let a = t.intern(&ms(&[1, 2]));
        let b = t.intern(&ms(&[2, 1]));
        let c = t.intern(&ms(&[2, 2]));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(t.len(), 2);
        assert_eq!(t.key_of(a), Some(ms(&[1, 2]).encode()));
    }

    proptest::proptest! {
        #[test]
        fn multiset_key_ignores_order(mut v in proptest::collection::vec(0usize..20, 0..12), seed in 0u64..1000) {
            let before = ms(&v).encode();
            let k = v.len().max(1);
            v.rotate_left((seed as usize) % k);
            v.reverse();
            proptest::prop_assert_eq!(before, ms(&v).encode());
        }

        #[test]
        fn key_equality_is_sorted_equality(a in proptest::collection::vec(0usize..5, 0..6),
                                           b in proptest::collection::vec(0usize..5, 0..6)) {
            let (mut sa, mut sb) = (a.clone(), b.clone());
            sa.sort_unstable();
            sb.sort_unstable();
            proptest::prop_assert_eq!(sa == sb, ms(&a).encode() == ms(&b).encode());
        }
    }
}

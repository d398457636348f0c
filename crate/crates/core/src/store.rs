//! Persistence of per-slice hierarchies.
//!
//! Tile layout (all integers little-endian):
//!
//! ```text
//! "BPH1"
//! u64 num_leaves
//! u64 size
//! size map entries: tag u8 (0 = vertex, 1 = edge), then u64 vertex | u64 u, u64 v
//! size x u64 parent
//! (size - num_leaves) x u64 weight
//! ```
//!
//! A [`DirectoryStore`] keeps one file `slice_<i>.<channel>.bph` per tile.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::VertexId;
use crate::hierarchy::{LocalHierarchy, MapEntry};
use crate::weight::Weight;

pub const MAGIC: &[u8; 4] = b"BPH1";
pub const EXTENSION: &str = "bph";

/// Which hierarchy of a slice a tile holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    /// Slice hierarchy after the causal pass.
    BUp,
    /// Merged border hierarchy of the causal pass.
    MUp,
    /// Final local hierarchy of the slice.
    BDown,
    /// Merged border hierarchy of the anti-causal pass.
    MDown,
}

impl Channel {
    pub const ALL: [Channel; 4] = [Channel::BUp, Channel::MUp, Channel::BDown, Channel::MDown];

    pub fn name(self) -> &'static str {
        match self {
            Channel::BUp => "bup",
            Channel::MUp => "mup",
            Channel::BDown => "bdown",
            Channel::MDown => "mdown",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Channel::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown channel {s:?}")))
    }
}

/// File name of a tile, e.g. `slice_3.bdown.bph`.
pub fn tile_file_name(slice: usize, channel: Channel) -> String {
    format!("slice_{slice}.{channel}.{EXTENSION}")
}

/// Inverse of [`tile_file_name`].
pub fn parse_tile_file_name(name: &str) -> Option<(usize, Channel)> {
    let rest = name
        .strip_prefix("slice_")?
        .strip_suffix(EXTENSION)?
        .strip_suffix('.')?;
    let (index, channel) = rest.split_once('.')?;
    Some((index.parse().ok()?, channel.parse().ok()?))
}

pub fn encode<W: Weight>(h: &LocalHierarchy<W>) -> Vec<u8> {
    let n = h.len();
    let mut out = Vec::with_capacity(4 + 16 + n * 17 + n * 8 + h.num_non_leaves() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(h.num_leaves() as u64).to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    for i in 0..n {
        match h.map_entry(i) {
            MapEntry::Vertex(v) => {
                out.push(0);
                out.extend_from_slice(&v.0.to_le_bytes());
            }
            MapEntry::Edge(u, v) => {
                out.push(1);
                out.extend_from_slice(&u.0.to_le_bytes());
                out.extend_from_slice(&v.0.to_le_bytes());
            }
        }
    }
    for &p in h.parents() {
        out.extend_from_slice(&(p as u64).to_le_bytes());
    }
    for w in h.weights() {
        let w = w.to_u64().expect("weight types are at most 64 bits wide");
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Format(format!("truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| Error::Format(format!("value {v} does not fit in usize")))
    }
}

pub fn decode<W: Weight>(bytes: &[u8]) -> Result<LocalHierarchy<W>> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let num_leaves = r.usize()?;
    let size = r.usize()?;
    if num_leaves > size {
        return Err(Error::Format(format!("{num_leaves} leaves in a tree of {size} nodes")));
    }
    // Each node needs at least 17 bytes; reject absurd sizes before allocating.
    if size.saturating_mul(17) > bytes.len() {
        return Err(Error::Format(format!("size {size} exceeds the tile length")));
    }
    let mut map = Vec::with_capacity(size);
    for _ in 0..size {
        map.push(match r.u8()? {
            0 => MapEntry::Vertex(VertexId(r.u64()?)),
            1 => MapEntry::Edge(VertexId(r.u64()?), VertexId(r.u64()?)),
            t => return Err(Error::Format(format!("unknown map tag {t}"))),
        });
    }
    let parent = (0..size).map(|_| r.usize()).collect::<Result<Vec<_>>>()?;
    let weights = (0..size - num_leaves)
        .map(|_| {
            let w = r.u64()?;
            W::from(w).ok_or_else(|| Error::Format(format!("weight {w} overflows the weight type")))
        })
        .collect::<Result<Vec<W>>>()?;
    if r.pos != bytes.len() {
        return Err(Error::Format(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    LocalHierarchy::from_map(num_leaves, parent, &map, weights).map_err(|e| Error::Format(e.to_string()))
}

/// Keyed storage of encoded per-slice hierarchies.
pub trait TileStore {
    fn write_tile(&mut self, slice: usize, channel: Channel, bytes: &[u8]) -> Result<()>;

    fn read_tile(&self, slice: usize, channel: Channel) -> Result<Vec<u8>>;

    fn save<W: Weight>(&mut self, slice: usize, channel: Channel, h: &LocalHierarchy<W>) -> Result<()> {
        self.write_tile(slice, channel, &encode(h))
    }

    fn load<W: Weight>(&self, slice: usize, channel: Channel) -> Result<LocalHierarchy<W>> {
        decode(&self.read_tile(slice, channel)?)
    }
}

/// Tiles kept in memory, still going through the binary encoding.
#[derive(Debug, Default, Clone)]
pub struct MemoryStore {
    tiles: HashMap<(usize, Channel), Vec<u8>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }
}

impl TileStore for MemoryStore {
    fn write_tile(&mut self, slice: usize, channel: Channel, bytes: &[u8]) -> Result<()> {
        self.tiles.insert((slice, channel), bytes.to_vec());
        Ok(())
    }

    fn read_tile(&self, slice: usize, channel: Channel) -> Result<Vec<u8>> {
        self.tiles
            .get(&(slice, channel))
            .cloned()
            .ok_or(Error::MissingTile { slice, channel })
    }
}

/// One file per tile in a directory.
#[derive(Debug, Clone)]
pub struct DirectoryStore {
    root: PathBuf,
}

impl DirectoryStore {
    /// Opens `root`, creating it if needed.
    pub fn create(root: impl Into<PathBuf>) -> std::io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(DirectoryStore { root })
    }

    /// Opens an existing directory.
    pub fn open(root: impl Into<PathBuf>) -> std::io::Result<Self> {
        let root = root.into();
        if !root.is_dir() {
            return Err(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{} is not a directory", root.display()),
            ));
        }
        Ok(DirectoryStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn tile_path(&self, slice: usize, channel: Channel) -> PathBuf {
        self.root.join(tile_file_name(slice, channel))
    }

    /// Tiles present in the directory, sorted by slice then channel.
    pub fn list(&self) -> std::io::Result<Vec<(usize, Channel)>> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.root)? {
            let entry = entry?;
            if let Some(key) = entry.file_name().to_str().and_then(parse_tile_file_name) {
                out.push(key);
            }
        }
        out.sort();
        Ok(out)
    }

    /// Removes every tile file of `channel`.
    pub fn clear_channel(&self, channel: Channel) -> std::io::Result<()> {
        for (slice, c) in self.list()? {
            if c == channel {
                fs::remove_file(self.tile_path(slice, c))?;
            }
        }
        Ok(())
    }
}

impl TileStore for DirectoryStore {
    fn write_tile(&mut self, slice: usize, channel: Channel, bytes: &[u8]) -> Result<()> {
        let path = self.tile_path(slice, channel);
        fs::write(&path, bytes).map_err(|source| Error::Io {
            slice,
            channel,
            path,
            source,
        })
    }

    fn read_tile(&self, slice: usize, channel: Channel) -> Result<Vec<u8>> {
        let path = self.tile_path(slice, channel);
        fs::read(&path).map_err(|source| match source.kind() {
            std::io::ErrorKind::NotFound => Error::MissingTile { slice, channel },
            _ => Error::Io {
                slice,
                channel,
                path,
                source,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridGraph;
    use crate::kruskal::build_graph_bph;

    #[test]
    fn file_names() {
        assert_eq!(tile_file_name(3, Channel::BDown), "slice_3.bdown.bph");
        assert_eq!(parse_tile_file_name("slice_12.mup.bph"), Some((12, Channel::MUp)));
        assert_eq!(parse_tile_file_name("slice_1.xyz.bph"), None);
        assert_eq!(parse_tile_file_name("slice_1.bup.txt"), None);
    }

    #[test]
    fn layout_of_a_three_node_tree() {
        let g = GridGraph::from_fn(1, 2, |_, _| 9u64);
        let h = build_graph_bph(&g);
        let bytes = encode(&h);
        let mut expected = b"BPH1".to_vec();
        expected.extend(2u64.to_le_bytes());
        expected.extend(3u64.to_le_bytes());
        expected.push(0);
        expected.extend(0u64.to_le_bytes());
        expected.push(0);
        expected.extend(1u64.to_le_bytes());
        expected.push(1);
        expected.extend(0u64.to_le_bytes());
        expected.extend(1u64.to_le_bytes());
        for p in [2u64, 2, 2] {
            expected.extend(p.to_le_bytes());
        }
        expected.extend(9u64.to_le_bytes());
        assert_eq!(bytes, expected);
        assert_eq!(decode::<u64>(&bytes).unwrap(), h);
    }

    #[test]
    fn corrupt_tiles_are_rejected() {
        let g = GridGraph::from_fn(2, 2, |a, b| a.0 ^ b.0);
        let bytes = encode(&build_graph_bph(&g));
        assert!(decode::<u64>(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode::<u64>(&extra).is_err());
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(decode::<u64>(&magic).is_err());
        let mut tag = bytes.clone();
        tag[20] = 7;
        assert!(decode::<u64>(&tag).is_err());
    }

    #[test]
    fn narrow_weight_overflow_is_reported() {
        let g = GridGraph::from_fn(1, 2, |_, _| 70_000u64);
        let bytes = encode(&build_graph_bph(&g));
        assert!(decode::<u16>(&bytes).is_err());
        assert!(decode::<u32>(&bytes).is_ok());
    }

    #[test]
    fn directory_store_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = DirectoryStore::create(dir.path().join("run")).unwrap();
        let g = GridGraph::from_fn(3, 3, |a, b| (a.0 + 2 * b.0) % 4);
        let h = build_graph_bph(&g);
        store.save(0, Channel::BUp, &h).unwrap();
        store.save(2, Channel::BDown, &h).unwrap();
        assert_eq!(store.load::<u64>(0, Channel::BUp).unwrap(), h);
        assert_eq!(store.list().unwrap(), vec![(0, Channel::BUp), (2, Channel::BDown)]);
        assert!(matches!(
            store.load::<u64>(1, Channel::BUp),
            Err(Error::MissingTile { slice: 1, .. })
        ));
        store.clear_channel(Channel::BUp).unwrap();
        assert_eq!(store.list().unwrap(), vec![(2, Channel::BDown)]);
    }
}

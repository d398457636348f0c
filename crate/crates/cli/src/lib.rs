//! `bph`: build, check and inspect the per-slice distribution of the binary
//! partition hierarchy of a grayscale image.

pub mod raster;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bph_core::kruskal::build_graph_bph;
use bph_core::store::decode;
use bph_core::{
    select, CausalPartition, Channel, DirectoryStore, Grid16, Hierarchy16, LocalHierarchy, TileStore, WeightRule,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub use raster::{write_pgm, Raster};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "bph",
    version,
    about = "Out-of-core binary partition hierarchies of grayscale images"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split the image into row slices and write one local hierarchy per slice.
    Build(BuildArgs),
    /// Recompute the distribution in memory and compare it with the tiles in `--out`.
    Verify(InputArgs),
    /// Print node counts, depth and weight range of every tile in a directory.
    Stats { dir: PathBuf },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// 8-bit or 16-bit binary PGM, or a BPHRAW16 file.
    pub image: PathBuf,
    /// Number of row slices.
    #[arg(long)]
    pub slices: usize,
    #[arg(long, value_enum, default_value_t = Weights::Absdiff)]
    pub weights: Weights,
    /// Tile directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Check the written tiles against an in-memory build of the whole image.
    #[arg(long)]
    pub verify_against_oracle: bool,
    /// Keep the intermediate bup, mup and mdown tiles.
    #[arg(long)]
    pub keep_intermediate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Weights {
    /// |I(x) - I(y)|
    Absdiff,
    /// max(I(x), I(y))
    Maxval,
}

impl From<Weights> for WeightRule {
    fn from(w: Weights) -> Self {
        match w {
            Weights::Absdiff => WeightRule::AbsDiff,
            Weights::Maxval => WeightRule::MaxVal,
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Build(args) => build(args, out),
        Command::Verify(args) => {
            let (g, p) = load_input(args)?;
            let store =
                DirectoryStore::open(&args.out).with_context(|| format!("cannot open {}", args.out.display()))?;
            verify(&g, &p, &store, out)
        }
        Command::Stats { dir } => stats(dir, out),
    }
}

fn load_input(args: &InputArgs) -> Result<(Grid16, CausalPartition)> {
    let img = Raster::load(&args.image)?;
    if args.slices == 0 || args.slices > img.height {
        bail!(
            "--slices must be between 1 and the image height {}, got {}",
            img.height,
            args.slices
        );
    }
    let g = Grid16::from_pixels(img.height, img.width, &img.pixels, args.weights.into())?;
    let p = CausalPartition::for_graph(&g, args.slices)?;
    Ok((g, p))
}

const CHANNELS: [Channel; 4] = [Channel::BUp, Channel::MUp, Channel::BDown, Channel::MDown];

fn build(args: &BuildArgs, out: &mut dyn Write) -> Result<i32> {
    let (g, p) = load_input(&args.input)?;
    let dir = &args.input.out;
    let mut store = DirectoryStore::create(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    for c in CHANNELS {
        store.clear_channel(c)?;
    }
    let dist = bph_core::run(&g, &p, &mut store)?;
    if !args.keep_intermediate {
        for c in [Channel::BUp, Channel::MUp, Channel::MDown] {
            store.clear_channel(c)?;
        }
    }
    writeln!(
        out,
        "{}x{} image, {} slices, {} edges",
        g.height(),
        g.width(),
        p.num_slices(),
        g.num_edges()
    )?;
    for i in 0..dist.num_slices() {
        let rows = p.rows(i)?;
        writeln!(
            out,
            "slice {i}: rows {}..{}, {} leaves, {} nodes",
            rows.start, rows.end, dist.leaf_counts[i], dist.node_counts[i]
        )?;
    }
    let gauge = &dist.stats.gauge;
    writeln!(
        out,
        "peak resident nodes {} (ceiling {})",
        gauge.peak_nodes,
        gauge.ceiling()
    )?;
    if args.verify_against_oracle {
        return verify(&g, &p, &store, out);
    }
    Ok(EXIT_OK)
}

/// Compares every bdown tile with the selection of the in-memory global
/// hierarchy. Holds the whole graph, so it is meant for test-sized inputs.
pub fn verify(g: &Grid16, p: &CausalPartition, store: &DirectoryStore, out: &mut dyn Write) -> Result<i32> {
    let global = build_graph_bph(g);
    let mut bad = 0;
    for i in 0..p.num_slices() {
        let expected = select(&global, &p.vertices(i)?)?;
        let verdict = match store.read_tile(i, Channel::BDown) {
            Err(bph_core::Error::MissingTile { .. }) => Some("missing".to_string()),
            Err(e) => return Err(e.into()),
            Ok(bytes) => match decode::<u16>(&bytes) {
                Err(e) => Some(format!("unreadable: {e}")),
                Ok(found) => diff(&found, &expected),
            },
        };
        match verdict {
            None => writeln!(out, "slice {i}: ok ({} nodes)", expected.len())?,
            Some(why) => {
                bad += 1;
                writeln!(out, "slice {i}: MISMATCH {why}")?;
            }
        }
    }
    for (i, c) in store.list()? {
        if c == Channel::BDown && i >= p.num_slices() {
            bad += 1;
            writeln!(out, "slice {i}: MISMATCH tile beyond the last slice")?;
        }
    }
    if bad == 0 {
        writeln!(out, "verified {} slices", p.num_slices())?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "{bad} slice(s) differ")?;
        Ok(EXIT_MISMATCH)
    }
}

fn diff(found: &Hierarchy16, expected: &Hierarchy16) -> Option<String> {
    if found == expected {
        return None;
    }
    if found.leaves() != expected.leaves() {
        return Some(format!(
            "leaf sets differ ({} vs {} leaves)",
            found.num_leaves(),
            expected.num_leaves()
        ));
    }
    if found.len() != expected.len() {
        return Some(format!("{} nodes, expected {}", found.len(), expected.len()));
    }
    let n = (0..found.len())
        .find(|&n| found.parent(n) != expected.parent(n) || found.node_key(n) != expected.node_key(n))
        .unwrap_or(0);
    Some(format!("first difference at node {n}"))
}

fn stats(dir: &Path, out: &mut dyn Write) -> Result<i32> {
    let store = DirectoryStore::open(dir).with_context(|| format!("cannot open {}", dir.display()))?;
    let tiles = store.list()?;
    if tiles.is_empty() {
        bail!("no tiles in {}", dir.display());
    }
    let mut bad = 0;
    for (i, c) in tiles {
        let name = bph_core::store::tile_file_name(i, c);
        let h: LocalHierarchy<u64> = match decode(&store.read_tile(i, c)?) {
            Ok(h) => h,
            Err(e) => {
                bad += 1;
                writeln!(out, "{name}: unreadable: {e}")?;
                continue;
            }
        };
        let range = match (h.weights().iter().min(), h.weights().iter().max()) {
            (Some(lo), Some(hi)) => format!("{lo}..={hi}"),
            _ => "-".to_string(),
        };
        let violations = h.validate();
        bad += usize::from(!violations.is_empty());
        writeln!(
            out,
            "{name}: {} nodes, {} leaves, {} non-leaves, {} roots, depth {}, weights {range}, {}",
            h.len(),
            h.num_leaves(),
            h.num_non_leaves(),
            h.roots().count(),
            h.depth(),
            if violations.is_empty() {
                "valid".to_string()
            } else {
                format!("{} violations", violations.len())
            }
        )?;
    }
    Ok(if bad == 0 { EXIT_OK } else { EXIT_MISMATCH })
}

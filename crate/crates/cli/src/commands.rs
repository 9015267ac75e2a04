use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use planiso::clustering::est_cluster;
use planiso::connectivity::vertex_connectivity;
use planiso::cover::{kd_cover, kd_cover_separating, multiplicity, CoverPiece};
use planiso::driver::{decide, decide_separating, list_occurrences, RunParams};
use planiso::generators::{delaunay, grid, random_planar};
use planiso::oracle::{brute_connectivity, brute_isomorphisms, brute_separating, OracleBudget};
use planiso::treedecomp::decompose_piece;
use planiso::{parse_graph, Graph};

use crate::{Command, Common, Family, Format, Invocation, OracleCommand, EXIT_NO, EXIT_OK};

/// Line-oriented writer for either output format.
struct Emit<'a> {
    out: &'a mut dyn Write,
    format: Format,
}

impl Emit<'_> {
    /// Writes `text` or the JSON record, depending on the format.
    fn record(&mut self, text: impl FnOnce() -> String, record: impl FnOnce() -> Value) -> Result<()> {
        match self.format {
            Format::Text => writeln!(self.out, "{}", text())?,
            Format::JsonLines => writeln!(self.out, "{}", record())?,
        }
        Ok(())
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn joined(values: &[usize]) -> String {
    values.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn terminal_mask(g: &Graph, terminals: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; g.n()];
    for &t in terminals {
        if t >= g.n() {
            bail!("terminal {t} out of range for a graph on {} vertices", g.n());
        }
        mask[t] = true;
    }
    Ok(mask)
}

fn resolve_seed(common: &Common, err: &mut dyn Write) -> Result<u64> {
    Ok(match common.seed {
        Some(s) => s,
        None => {
            let s = rand::random::<u64>();
            writeln!(err, "seed: {s}")?;
            s
        }
    })
}

fn params(common: &Common, seed: u64) -> RunParams {
    RunParams {
        seed,
        confidence: common.confidence,
        threads: common.threads,
        ..RunParams::default()
    }
}

pub(crate) fn dispatch(inv: &Invocation, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let common = &inv.common;
    let mut emit = Emit {
        out,
        format: common.format,
    };
    match &inv.command {
        Command::Decide {
            graph,
            pattern,
            terminals,
        } => {
            let (g, h) = (read_graph(graph)?, read_graph(pattern)?);
            let p = params(common, resolve_seed(common, err)?);
            let decision = match terminals {
                None => decide(&g, &h, &p)?,
                Some(t) => decide_separating(&g, &h, &terminal_mask(&g, t)?, &p)?,
            };
            match &decision.certificate {
                Some(o) => {
                    emit.record(
                        || format!("YES\nmap: {}", joined(&o.map)),
                        || json!({"answer": "YES", "map": o.map, "repetition": o.repetition, "piece": o.piece}),
                    )?;
                    Ok(EXIT_OK)
                }
                None => {
                    emit.record(
                        || "NO".into(),
                        || json!({"answer": "NO", "repetitions": decision.repetitions}),
                    )?;
                    Ok(EXIT_NO)
                }
            }
        }
        Command::List { graph, pattern } => {
            let (g, h) = (read_graph(graph)?, read_graph(pattern)?);
            let p = params(common, resolve_seed(common, err)?);
            let listing = list_occurrences(&g, &h, &p)?;
            for o in &listing.occurrences {
                emit.record(
                    || joined(&o.map),
                    || json!({"map": o.map, "repetition": o.repetition, "piece": o.piece}),
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::Connectivity { graph } => {
            let g = read_graph(graph)?;
            let p = params(common, resolve_seed(common, err)?);
            let c = vertex_connectivity(&g, &p)?;
            emit.record(
                || format!("{}\ncut: {}", c.value, joined(&c.cut)),
                || json!({"connectivity": c.value, "cut": c.cut}),
            )?;
            Ok(EXIT_OK)
        }
        Command::Cluster { graph, beta } => {
            if !(beta.is_finite() && *beta > 0.0) {
                bail!("beta must be positive, got {beta}");
            }
            let g = read_graph(graph)?;
            let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(common, err)?);
            let clustering = est_cluster(&g, *beta, &mut rng);
            for (i, members) in clustering.members().into_iter().enumerate() {
                let center = clustering.centers[i];
                emit.record(
                    || format!("cluster {i} center {center}: {}", joined(&members)),
                    || json!({"cluster": i, "center": center, "members": members}),
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::Cover { graph, k, d, terminals } => {
            if *k == 0 {
                bail!("k must be positive");
            }
            let g = read_graph(graph)?;
            let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(common, err)?);
            let pieces = match terminals {
                None => kd_cover(&g, *k, *d, &mut rng),
                Some(t) => kd_cover_separating(&g, *k, *d, &terminal_mask(&g, t)?, &mut rng),
            };
            for (i, piece) in pieces.iter().enumerate() {
                write_piece(&mut emit, i, piece)?;
            }
            let most = multiplicity(&pieces, g.n()).into_iter().max().unwrap_or(0);
            emit.record(
                || format!("pieces {} multiplicity {most}", pieces.len()),
                || json!({"pieces": pieces.len(), "multiplicity": most}),
            )?;
            Ok(EXIT_OK)
        }
        Command::Oracle(cmd) => oracle(cmd, &mut emit),
        Command::Gen { family, output } => {
            let g = match *family {
                Family::Delaunay { n } => delaunay(n, resolve_seed(common, err)?),
                Family::Planar { n, keep } => {
                    if !(0.0..=1.0).contains(&keep) {
                        bail!("keep must lie in [0, 1], got {keep}");
                    }
                    random_planar(n, keep, resolve_seed(common, err)?)
                }
                Family::Grid { rows, cols } => grid(rows, cols),
            };
            match output {
                Some(path) => fs::write(path, g.to_text()).with_context(|| format!("writing {}", path.display()))?,
                None => write!(emit.out, "{}", g.to_text())?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn write_piece(emit: &mut Emit<'_>, i: usize, piece: &CoverPiece) -> Result<()> {
    let width = decompose_piece(piece)?.width();
    let window: Vec<usize> = piece.window_vertices().filter_map(|v| piece.original(v)).collect();
    let (lo, hi) = piece.level_window;
    let merged = piece.merged_count();
    emit.record(
        || {
            format!(
                "piece {i} cluster {} levels {lo}..{hi} width {width} merged {merged}: {}",
                piece.cluster,
                joined(&window)
            )
        },
        || {
            json!({
                "piece": i,
                "cluster": piece.cluster,
                "levels": [lo, hi],
                "width": width,
                "merged": merged,
                "window": window,
            })
        },
    )
}

fn oracle(cmd: &OracleCommand, emit: &mut Emit<'_>) -> Result<i32> {
    let maps = match cmd {
        OracleCommand::Iso { graph, pattern } => {
            let (g, h) = (read_graph(graph)?, read_graph(pattern)?);
            brute_isomorphisms(&g, &h, None, OracleBudget::default())?
        }
        OracleCommand::Separating {
            graph,
            pattern,
            terminals,
        } => {
            let (g, h) = (read_graph(graph)?, read_graph(pattern)?);
            brute_separating(&g, &h, &terminal_mask(&g, terminals)?, None, OracleBudget::default())?
        }
        OracleCommand::Connectivity { graph, max_n } => {
            let g = read_graph(graph)?;
            let budget = OracleBudget {
                max_n: *max_n,
                ..OracleBudget::CONNECTIVITY
            };
            let (value, cut) = brute_connectivity(&g, budget)?;
            emit.record(
                || format!("{value}\ncut: {}", joined(&cut)),
                || json!({"connectivity": value, "cut": cut}),
            )?;
            return Ok(EXIT_OK);
        }
    };
    for map in &maps {
        emit.record(|| joined(map), || json!({"map": map}))?;
    }
    Ok(EXIT_OK)
}

//! Cross-scale k-nearest-neighbor graph between LR query patches and patches
//! of the downsampled LR image.

use std::fmt::Write as _;
use std::ops::Range;

use rayon::prelude::*;

use crate::color::rgb_to_y;
use crate::config::AggregationConfig;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::patch::{extract_patch, Patch, PatchCoord, ScaleTag};

/// One neighbor of a query.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphEdge {
    /// Top-left of the matched `l`x`l` patch in the downsampled image.
    pub neighbor_down: PatchCoord,
    /// Top-left of the `ls`x`ls` region of the LR image the match came from.
    pub neighbor_hr: PatchCoord,
    /// Euclidean distance between query and matched patch.
    pub distance: f64,
    /// Query minus matched patch, sample by sample.
    pub edge_label: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossScaleGraph {
    pub scale: usize,
    pub patch: usize,
    pub k: usize,
    /// Query top-lefts in the LR image, raster order.
    pub queries: Vec<PatchCoord>,
    /// `edges[i]` holds the k neighbors of `queries[i]`, ascending by distance.
    pub edges: Vec<Vec<GraphEdge>>,
}

impl CrossScaleGraph {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// Line-oriented dump: `q_row q_col | n_row n_col dist | ...`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (q, edges) in self.queries.iter().zip(&self.edges) {
            let _ = write!(out, "{} {}", q.row, q.col);
            for e in edges {
                let _ = write!(
                    out,
                    " | {} {} {}",
                    e.neighbor_down.row, e.neighbor_down.col, e.distance
                );
            }
            out.push('\n');
        }
        out
    }
}

/// One parsed line of a graph dump.
#[derive(Debug, Clone, PartialEq)]
pub struct DumpLine {
    pub query: (usize, usize),
    pub neighbors: Vec<(usize, usize, f64)>,
}

/// Parses the output of [`CrossScaleGraph::to_text`].
pub fn parse_dump(text: &str) -> Result<Vec<DumpLine>> {
    let bad = |n: usize, what: &str| Error::InvalidInput(format!("graph dump line {n}: {what}"));
    let mut out = Vec::new();
    for (n, line) in text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
    {
        let mut fields = line.split('|');
        let head: Vec<usize> = fields
            .next()
            .unwrap_or_default()
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad(n + 1, "query coordinate"))?;
        if head.len() != 2 {
            return Err(bad(n + 1, "query needs two coordinates"));
        }
        let mut neighbors = Vec::new();
        for field in fields {
            let parts: Vec<&str> = field.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(bad(n + 1, "neighbor needs row, col, distance"));
            }
            let row = parts[0].parse().map_err(|_| bad(n + 1, "neighbor row"))?;
            let col = parts[1].parse().map_err(|_| bad(n + 1, "neighbor col"))?;
            let dist = parts[2].parse().map_err(|_| bad(n + 1, "distance"))?;
            neighbors.push((row, col, dist));
        }
        out.push(DumpLine {
            query: (head[0], head[1]),
            neighbors,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    row: usize,
    col: usize,
    dist2: f64,
}

/// Top-left positions `[center - d/2, center - d/2 + d)` clipped to `0..limit`.
fn window_range(center: usize, d: usize, limit: usize) -> Range<usize> {
    let start = center as isize - (d / 2) as isize;
    let end = start + d as isize;
    let lo = start.clamp(0, limit as isize) as usize;
    let hi = end.clamp(0, limit as isize) as usize;
    lo..hi
}

/// Exhaustive windowed search. `query` holds `l*l*channels` samples laid out
/// like an image patch.
fn search_window(
    query: &[f64],
    hay: &Image,
    l: usize,
    center: (usize, usize),
    d: usize,
    k: usize,
) -> Result<Vec<Candidate>> {
    let ch = hay.channels();
    debug_assert_eq!(query.len(), l * l * ch);
    let (rows, cols) = if hay.height() < l || hay.width() < l {
        (0..0, 0..0)
    } else {
        (
            window_range(center.0, d, hay.height() - l + 1),
            window_range(center.1, d, hay.width() - l + 1),
        )
    };
    let available = rows.len() * cols.len();
    if available < k {
        return Err(Error::InsufficientCandidates {
            available,
            requested: k,
        });
    }

    let span = l * ch;
    let mut best: Vec<Candidate> = Vec::with_capacity(k + 1);
    for r in rows {
        'cand: for c in cols.clone() {
            let bound = if best.len() == k {
                best[k - 1].dist2
            } else {
                f64::INFINITY
            };
            let mut dist2 = 0.0;
            for i in 0..l {
                let hay_row = &hay.row(r + i)[c * ch..c * ch + span];
                let q_row = &query[i * span..(i + 1) * span];
                for (a, b) in q_row.iter().zip(hay_row) {
                    let diff = a - b;
                    dist2 += diff * diff;
                }
                // Equal distances lose to earlier raster positions, so `>=` is safe.
                if dist2 >= bound {
                    continue 'cand;
                }
            }
            let pos = best.partition_point(|b| b.dist2 <= dist2);
            best.insert(
                pos,
                Candidate {
                    row: r,
                    col: c,
                    dist2,
                },
            );
            best.truncate(k);
        }
    }
    Ok(best)
}

/// The `k` nearest `l`x`l` patches of `haystack` to `query` among top-left
/// positions in the `d`x`d` window around `window_center`.
///
/// Results are sorted by ascending Euclidean distance, ties broken by raster
/// order of the candidate's top-left corner.
pub fn knn_search(
    query: &Patch,
    haystack: &Image,
    window_center: PatchCoord,
    d: usize,
    k: usize,
    l: usize,
) -> Result<Vec<(PatchCoord, f64)>> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if query.side() != l {
        return Err(Error::InvalidInput(format!(
            "query side {} differs from l = {l}",
            query.side()
        )));
    }
    if query.channels() != haystack.channels() {
        return Err(Error::ChannelMismatch {
            expected: haystack.channels(),
            actual: query.channels(),
        });
    }
    let found = search_window(
        query.data(),
        haystack,
        l,
        (window_center.row, window_center.col),
        d,
        k,
    )?;
    Ok(found
        .into_iter()
        .map(|c| {
            (
                PatchCoord::new(c.row, c.col, window_center.scale_tag),
                c.dist2.sqrt(),
            )
        })
        .collect())
}

/// Positions `0, stride, 2*stride, ...` up to `extent - l`, always ending at `extent - l`.
pub fn query_positions(extent: usize, l: usize, stride: usize) -> Vec<usize> {
    if extent < l {
        return Vec::new();
    }
    let last = extent - l;
    let mut out: Vec<usize> = (0..=last).step_by(stride.max(1)).collect();
    if out.last() != Some(&last) {
        out.push(last);
    }
    out
}

/// Raster-ordered query grid over an image of the given size.
pub fn query_grid(width: usize, height: usize, l: usize, stride: usize) -> Vec<PatchCoord> {
    let cols = query_positions(width, l, stride);
    query_positions(height, l, stride)
        .into_iter()
        .flat_map(|r| {
            cols.iter()
                .map(move |&c| PatchCoord::new(r, c, ScaleTag::Lr))
        })
        .collect()
}

fn embed(img: &Image, y_only: bool) -> Result<Image> {
    if y_only && img.channels() == 3 {
        rgb_to_y(img)
    } else {
        Ok(img.clone())
    }
}

/// Builds the cross-scale graph between `lr` and `lr_down`, the latter being
/// `lr` downsampled by `cfg.scale`.
pub fn build_graph(
    lr: &Image,
    lr_down: &Image,
    cfg: &AggregationConfig,
) -> Result<CrossScaleGraph> {
    cfg.validate()?;
    let s = cfg.scale;
    if !lr.width().is_multiple_of(s)
        || !lr.height().is_multiple_of(s)
        || lr_down.width() != lr.width() / s
        || lr_down.height() != lr.height() / s
    {
        return Err(Error::ScaleMismatch(format!(
            "{}x{} is not {}x{} downsampled by {s}",
            lr_down.width(),
            lr_down.height(),
            lr.width(),
            lr.height()
        )));
    }
    if lr.channels() != lr_down.channels() {
        return Err(Error::ChannelMismatch {
            expected: lr.channels(),
            actual: lr_down.channels(),
        });
    }
    let l = cfg.patch;
    let queries = query_grid(lr.width(), lr.height(), l, cfg.stride);
    if queries.is_empty() {
        return Err(Error::ImageTooSmall(format!(
            "{}x{} image has no {l}x{l} query patch",
            lr.width(),
            lr.height()
        )));
    }

    let lr_embed = embed(lr, cfg.y_only)?;
    let down_embed = embed(lr_down, cfg.y_only)?;

    let edges = queries
        .par_iter()
        .map(|&q| {
            let query = extract_patch(&lr_embed, q, l)?;
            let found = search_window(
                query.data(),
                &down_embed,
                l,
                (q.row / s, q.col / s),
                cfg.window,
                cfg.k,
            )?;
            found
                .into_iter()
                .map(|cand| {
                    let down = PatchCoord::new(cand.row, cand.col, ScaleTag::LrDown);
                    let neighbor = extract_patch(&down_embed, down, l)?;
                    let edge_label = query
                        .data()
                        .iter()
                        .zip(neighbor.data())
                        .map(|(a, b)| a - b)
                        .collect();
                    Ok(GraphEdge {
                        neighbor_down: down,
                        neighbor_hr: PatchCoord::new(cand.row * s, cand.col * s, ScaleTag::Lr),
                        distance: cand.dist2.sqrt(),
                        edge_label,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CrossScaleGraph {
        scale: s,
        patch: l,
        k: cfg.k,
        queries,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(w: usize, h: usize, ch: usize, seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::from_fn(w, h, ch, |_, _, _| rng.gen::<f64>()).unwrap()
    }

    /// Every window position scored independently, then fully sorted.
    fn brute_force(
        query: &Patch,
        hay: &Image,
        rows: Range<usize>,
        cols: Range<usize>,
        k: usize,
    ) -> Vec<(usize, usize, f64)> {
        let l = query.side();
        let mut all = Vec::new();
        for r in rows {
            for c in cols.clone() {
                let mut s = 0.0;
                for i in 0..l {
                    for j in 0..l {
                        for ch in 0..hay.channels() {
                            let d = query.get(i, j, ch) - hay.get(r + i, c + j, ch);
                            s += d * d;
                        }
                    }
                }
                all.push((r, c, s.sqrt()));
            }
        }
        all.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
        all.truncate(k);
        all
    }

    #[test]
    fn exact_match_comes_first() {
        let hay = random(12, 12, 1, 1);
        let q = extract_patch(&hay, PatchCoord::new(4, 6, ScaleTag::LrDown), 3).unwrap();
        let found = knn_search(&q, &hay, PatchCoord::new(5, 5, ScaleTag::LrDown), 8, 3, 3).unwrap();
        assert_eq!((found[0].0.row, found[0].0.col), (4, 6));
        assert_eq!(found[0].1, 0.0);
    }

    #[test]
    fn window_search_matches_brute_force() {
        let hay = random(12, 12, 1, 42);
        let query_src = random(3, 3, 1, 7);
        let q = extract_patch(&query_src, PatchCoord::new(0, 0, ScaleTag::Lr), 3).unwrap();
        for center in [(5, 5), (0, 0), (9, 2), (11, 11)] {
            let found = knn_search(
                &q,
                &hay,
                PatchCoord::new(center.0, center.1, ScaleTag::LrDown),
                8,
                3,
                3,
            )
            .unwrap();
            // Window: top-lefts center-4 .. center+4, clipped to 0..=9.
            let rows = center.0.saturating_sub(4)..(center.0 + 4).min(10);
            let cols = center.1.saturating_sub(4)..(center.1 + 4).min(10);
            let expected = brute_force(&q, &hay, rows, cols, 3);
            assert_eq!(found.len(), 3);
            for (got, want) in found.iter().zip(&expected) {
                assert_eq!((got.0.row, got.0.col), (want.0, want.1));
                assert!((got.1 - want.2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn huge_window_is_whole_image_search() {
        let hay = random(12, 10, 3, 9);
        let query_src = random(3, 3, 3, 10);
        let q = extract_patch(&query_src, PatchCoord::new(0, 0, ScaleTag::Lr), 3).unwrap();
        let found =
            knn_search(&q, &hay, PatchCoord::new(3, 8, ScaleTag::LrDown), 24, 6, 3).unwrap();
        let expected = brute_force(&q, &hay, 0..8, 0..10, 6);
        for (got, want) in found.iter().zip(&expected) {
            assert_eq!((got.0.row, got.0.col), (want.0, want.1));
            assert!((got.1 - want.2).abs() < 1e-12);
        }
    }

    #[test]
    fn ties_resolve_in_raster_order() {
        let hay = Image::filled(6, 6, 1, 0.25).unwrap();
        let q = extract_patch(&hay, PatchCoord::new(0, 0, ScaleTag::Lr), 2).unwrap();
        let found = knn_search(&q, &hay, PatchCoord::new(2, 2, ScaleTag::LrDown), 4, 4, 2).unwrap();
        let coords: Vec<_> = found.iter().map(|(p, _)| (p.row, p.col)).collect();
        assert_eq!(coords, vec![(0, 0), (0, 1), (0, 2), (0, 3)]);
    }

    #[test]
    fn too_few_candidates() {
        let hay = random(4, 4, 1, 3);
        let q = extract_patch(&hay, PatchCoord::new(0, 0, ScaleTag::Lr), 3).unwrap();
        let err =
            knn_search(&q, &hay, PatchCoord::new(0, 0, ScaleTag::LrDown), 30, 5, 3).unwrap_err();
        assert!(matches!(
            err,
            Error::InsufficientCandidates {
                available: 4,
                requested: 5
            }
        ));
    }

    #[test]
    fn query_grid_always_reaches_far_edge() {
        assert_eq!(query_positions(8, 3, 1), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(query_positions(8, 3, 2), vec![0, 2, 4, 5]);
        assert_eq!(query_positions(8, 3, 3), vec![0, 3, 5]);
        assert_eq!(query_positions(2, 3, 1), Vec::<usize>::new());
        assert_eq!(query_grid(4, 3, 2, 1).len(), 3 * 2);
    }

    #[test]
    fn scale_mismatch_is_reported() {
        let lr = random(16, 16, 1, 1);
        let wrong = random(7, 8, 1, 2);
        let err = build_graph(&lr, &wrong, &AggregationConfig::default()).unwrap_err();
        assert!(matches!(err, Error::ScaleMismatch(_)));
    }

    #[test]
    fn self_graph_matches_itself() {
        let lr = random(10, 10, 3, 5);
        let cfg = AggregationConfig {
            scale: 1,
            k: 2,
            ..AggregationConfig::default()
        };
        let g = build_graph(&lr, &lr, &cfg).unwrap();
        for (q, edges) in g.queries.iter().zip(&g.edges) {
            assert_eq!(edges.len(), 2);
            assert_eq!(
                (edges[0].neighbor_down.row, edges[0].neighbor_down.col),
                (q.row, q.col)
            );
            assert_eq!(edges[0].distance, 0.0);
            assert!(edges[0].edge_label.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn y_only_embedding_shortens_labels() {
        let lr = random(8, 8, 3, 5);
        let down = random(4, 4, 3, 6);
        let cfg = AggregationConfig {
            k: 2,
            y_only: true,
            ..AggregationConfig::default()
        };
        let g = build_graph(&lr, &down, &cfg).unwrap();
        assert!(g.edges.iter().flatten().all(|e| e.edge_label.len() == 9));
    }

    #[test]
    fn dump_round_trips() {
        let lr = random(8, 8, 1, 5);
        let down = random(4, 4, 1, 6);
        let cfg = AggregationConfig {
            k: 2,
            ..AggregationConfig::default()
        };
        let g = build_graph(&lr, &down, &cfg).unwrap();
        let text = g.to_text();
        let parsed = parse_dump(&text).unwrap();
        assert_eq!(parsed.len(), g.len());
        for (line, (q, edges)) in parsed.iter().zip(g.queries.iter().zip(&g.edges)) {
            assert_eq!(line.query, (q.row, q.col));
            for (n, e) in line.neighbors.iter().zip(edges) {
                assert_eq!((n.0, n.1), (e.neighbor_down.row, e.neighbor_down.col));
                assert_eq!(n.2, e.distance);
            }
        }
        assert!(parse_dump("1 2 | 3 x 0.5").is_err());
    }
}

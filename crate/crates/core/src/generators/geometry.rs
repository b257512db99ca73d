use std::num::NonZero;

use kiddo::{ImmutableKdTree, SquaredEuclidean};

use crate::instance::NodeCoord;

/// Edge lengths are rounded up to multiples of this, so that path sums are
/// exact in `f64` and no length falls below its chord.
pub const LENGTH_GRID: f64 = 1.0 / (1u64 << 20) as f64;

pub fn grid_length(chord: f64) -> f64 {
    (chord / LENGTH_GRID).ceil() * LENGTH_GRID
}

/// Undirected k-nearest-neighbour union as sorted pairs `(i, j)`, `i < j`.
/// Neighbour ties are broken by index.
pub fn knn_pairs(points: &[NodeCoord], dim: u8, k: usize) -> Vec<(usize, usize)> {
    let lists = match dim {
        2 => knn::<2>(&points.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(), k),
        _ => knn::<3>(
            &points
                .iter()
                .map(|p| [p.x, p.y, p.z.unwrap_or(0.0)])
                .collect::<Vec<_>>(),
            k,
        ),
    };
    let mut pairs: Vec<(usize, usize)> = lists
        .iter()
        .enumerate()
        .flat_map(|(i, list)| list.iter().map(move |&j| (i.min(j), i.max(j))))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

fn knn<const K: usize>(points: &[[f64; K]], k: usize) -> Vec<Vec<usize>> {
    let n = points.len();
    if n < 2 || k == 0 {
        return vec![Vec::new(); n];
    }
    let tree: ImmutableKdTree<f64, K> =
        ImmutableKdTree::new_from_slice(points).expect("finite coordinates");
    // a few spare candidates so index tie-breaking does not depend on the tree
    let want = NonZero::new((k + 3).min(n)).expect("n >= 2");
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut found: Vec<(f64, usize)> = tree
                .query(p)
                .nearest_n::<SquaredEuclidean<f64>>(want)
                .execute()
                .into_iter()
                .map(|r| (r.distance, r.item as usize))
                .filter(|&(_, j)| j != i)
                .collect();
            found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            found.truncate(k);
            found.into_iter().map(|(_, j)| j).collect()
        })
        .collect()
}

/// The pair of points at maximum distance, smallest `(i, j)` among ties.
pub fn farthest_pair(points: &[NodeCoord]) -> (usize, usize) {
    let n = points.len();
    assert!(n >= 2, "need two points");
    let inv = 1.0 / n as f64;
    let centroid = NodeCoord {
        x: points.iter().map(|p| p.x).sum::<f64>() * inv,
        y: points.iter().map(|p| p.y).sum::<f64>() * inv,
        z: points[0]
            .z
            .map(|_| points.iter().map(|p| p.z.unwrap_or(0.0)).sum::<f64>() * inv),
    };
    let radius: Vec<f64> = points.iter().map(|p| p.distance(&centroid)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| radius[b].total_cmp(&radius[a]).then(a.cmp(&b)));

    let sq = |a: &NodeCoord, b: &NodeCoord| {
        let dz = a.z.unwrap_or(0.0) - b.z.unwrap_or(0.0);
        (a.x - b.x).powi(2) + (a.y - b.y).powi(2) + dz * dz
    };
    let mut best = (f64::NEG_INFINITY, 0, 1);
    for (a, &i) in order.iter().enumerate() {
        // |pi - pj| <= r_i + r_j; a slack keeps rounding from pruning ties
        if 2.0 * radius[i] * (1.0 + 1e-9) < best.0.sqrt() {
            break;
        }
        for &j in &order[a + 1..] {
            if (radius[i] + radius[j]) * (1.0 + 1e-9) < best.0.sqrt() {
                break;
            }
            let d = sq(&points[i], &points[j]);
            let key = (i.min(j), i.max(j));
            if d > best.0 || (d == best.0 && key < (best.1, best.2)) {
                best = (d, key.0, key.1);
            }
        }
    }
    (best.1, best.2)
}

//! IFS-aligned grid construction.

use super::{AlignedGrid, PencilError};
use crate::selfsim::{CellWord, SimilarityParams};

const NODE_GUARD: u128 = 10_000_000;

/// Builds the grid of all depth-m cell endpoints.
///
/// Nodes are generated by recursive subdivision: each cell contributes its
/// own left endpoint and the images left + width * alpha_k of the interior
/// breakpoints, so a coarser grid's nodes reappear bit-for-bit in every
/// finer grid (the nesting property holds exactly, not just to rounding).
pub fn build_grid(p: &SimilarityParams, depth: usize) -> Result<AlignedGrid, PencilError> {
    if depth == 0 {
        return Err(PencilError::DepthZero);
    }
    let n = p.n() as u128;
    let cells = n
        .checked_pow(depth as u32)
        .ok_or(PencilError::GridTooLarge {
            depth,
            nodes: u128::MAX,
        })?;
    if cells + 1 > NODE_GUARD {
        return Err(PencilError::GridTooLarge {
            depth,
            nodes: cells + 1,
        });
    }
    let cell_count = cells as usize;

    let mut nodes = Vec::with_capacity(cell_count + 1);
    let mut cell_words = Vec::with_capacity(cell_count);
    let mut word = Vec::with_capacity(depth);
    subdivide(p, depth, 0.0, 1.0, &mut word, &mut nodes, &mut cell_words);
    nodes.push(1.0);

    Ok(AlignedGrid {
        depth,
        pieces: p.n(),
        nodes,
        cell_words,
    })
}

fn subdivide(
    p: &SimilarityParams,
    levels: usize,
    left: f64,
    width: f64,
    word: &mut Vec<u8>,
    nodes: &mut Vec<f64>,
    cell_words: &mut Vec<CellWord>,
) {
    if levels == 0 {
        nodes.push(left);
        cell_words
            .push(CellWord::from_indices(word.clone(), p.n()).expect("indices built in range"));
        return;
    }
    for k in 0..p.n() {
        let sub_left = if k == 0 {
            left
        } else {
            left + width * p.alpha()[k]
        };
        word.push(k as u8);
        subdivide(
            p,
            levels - 1,
            sub_left,
            width * p.a()[k],
            word,
            nodes,
            cell_words,
        );
        word.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selfsim::{cantor, linear};

    #[test]
    fn cantor_depth_two_ninths() {
        let g = build_grid(&cantor().unwrap(), 2).unwrap();
        assert_eq!(g.nodes().len(), 10);
        for (i, &x) in g.nodes().iter().enumerate() {
            assert!((x - i as f64 / 9.0).abs() < 1e-15, "node {i} = {x}");
        }
        assert_eq!(g.interior_size(), 8);
    }

    #[test]
    fn depth_one_nodes_are_breakpoints() {
        let p = linear(2).unwrap();
        let g = build_grid(&p, 1).unwrap();
        let expected = (3.0 - 5f64.sqrt()) / 2.0;
        assert_eq!(g.nodes().len(), 3);
        assert_eq!(g.nodes()[0], 0.0);
        assert!((g.nodes()[1] - expected).abs() < 1e-15);
        assert_eq!(g.nodes()[2], 1.0);
    }

    #[test]
    fn grids_nest_exactly() {
        let p = linear(2).unwrap();
        let coarse = build_grid(&p, 3).unwrap();
        let fine = build_grid(&p, 4).unwrap();
        // every coarse node appears in the fine grid bit-for-bit
        for &x in coarse.nodes() {
            assert!(
                fine.nodes().contains(&x),
                "coarse node {x} missing from fine grid"
            );
        }
    }

    #[test]
    fn nodes_strictly_increasing() {
        for p in [cantor().unwrap(), linear(3).unwrap()] {
            let g = build_grid(&p, 5).unwrap();
            for w in g.nodes().windows(2) {
                assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn guard_rejects_huge_grids() {
        let err = build_grid(&cantor().unwrap(), 20);
        assert!(matches!(err, Err(PencilError::GridTooLarge { .. })));
        assert!(matches!(
            build_grid(&cantor().unwrap(), 0),
            Err(PencilError::DepthZero)
        ));
    }

    #[test]
    fn words_match_intervals() {
        let p = cantor().unwrap();
        let g = build_grid(&p, 3).unwrap();
        assert_eq!(g.cell_words().len(), 27);
        assert_eq!(g.cell_words()[0].indices(), &[0, 0, 0]);
        assert_eq!(g.cell_words()[26].indices(), &[2, 2, 2]);
        // each interval is its word's cell
        for (i, w) in g.cell_words().iter().enumerate() {
            let (lo, hi) = crate::selfsim::cell_bounds(&p, w);
            assert!((g.nodes()[i] - lo).abs() < 1e-14);
            assert!((g.nodes()[i + 1] - hi).abs() < 1e-14);
        }
    }
}

//! Direct computations that bypass the optimized paths.

use num_bigint::BigInt;
use polar_snf::predict::dimension_constant;
use polar_snf::snf;
use polar_snf::srg::{self, Instance};
use polar_snf::{build_graph, standard_form, IntegerMatrix, PolarFamily, PrimePower};

fn inst(f: PolarFamily, q: u64, m: u32) -> Instance {
    Instance::new(f, PrimePower::from_value(q).unwrap(), m).unwrap()
}

/// Determinant by dynamic programming over column subsets (row-by-row Laplace
/// expansion), exact in `i128` for the sizes used here.
fn subset_determinant(m: &IntegerMatrix) -> i128 {
    let n = m.rows();
    let mut dp = vec![0i128; 1 << n];
    dp[0] = 1;
    for mask in 0usize..(1 << n) {
        if dp[mask] == 0 {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for c in 0..n {
            if mask & (1 << c) != 0 || m.get(row, c) == 0 {
                continue;
            }
            // sign of placing column c after the columns already used
            let above = (mask >> c).count_ones();
            let sign = if above % 2 == 0 { 1 } else { -1 };
            dp[mask | (1 << c)] += sign * i128::from(m.get(row, c)) * dp[mask];
        }
    }
    dp[(1 << n) - 1]
}

#[test]
fn subset_determinant_sanity() {
    let m = IntegerMatrix::from_rows(vec![vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 2]]);
    assert_eq!(subset_determinant(&m), 6);
    let p = IntegerMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]);
    assert_eq!(subset_determinant(&p), -1);
}

#[test]
fn symplectic_determinant_and_trees_by_expansion() {
    let g = build_graph(PolarFamily::S, PrimePower::from_value(2).unwrap(), 2).unwrap();
    let a = g.adjacency_matrix();
    assert_eq!(subset_determinant(&a).abs(), 1458);
    assert_eq!(BigInt::from(subset_determinant(&a)), snf::bareiss_determinant(&a));
    let trees = subset_determinant(&g.laplacian_matrix().minor(0, 0));
    assert_eq!(trees, 7_688_671_875);
    assert_eq!(trees, 3i128.pow(9) * 5i128.pow(8));
}

fn all_vectors(size: u32, n: usize) -> impl Iterator<Item = Vec<u32>> {
    (0..(size as u64).pow(n as u32)).map(move |mut code| {
        (0..n)
            .map(|_| {
                let d = (code % size as u64) as u32;
                code /= size as u64;
                d
            })
            .collect()
    })
}

#[test]
fn point_counts_by_brute_force() {
    let cases = [
        (PolarFamily::S, 2, 2),
        (PolarFamily::S, 3, 2),
        (PolarFamily::S, 2, 3),
        (PolarFamily::O, 3, 2),
        (PolarFamily::O, 2, 2),
        (PolarFamily::OMinus, 2, 3),
        (PolarFamily::OMinus, 2, 4),
        (PolarFamily::OPlus, 2, 3),
        (PolarFamily::OPlus, 3, 3),
        (PolarFamily::UE, 2, 2),
        (PolarFamily::UO, 2, 2),
    ];
    for (fam, q, m) in cases {
        let q = PrimePower::from_value(q).unwrap();
        let space = standard_form(fam, q, m).unwrap();
        let size = space.field().size();
        let singular = all_vectors(size, space.dimension())
            .filter(|x| x.iter().any(|&c| c != 0) && space.is_singular(x))
            .count() as u64;
        let g = build_graph(fam, q, m).unwrap();
        assert_eq!(singular % u64::from(size - 1), 0, "{fam:?}");
        assert_eq!(singular / u64::from(size - 1), g.vertex_count() as u64, "{fam:?}({}, {m})", q.value());
        assert_eq!(BigInt::from(g.vertex_count()), srg::srg_params(&inst(fam, q.value(), m)).v);
        let vs = g.vertices();
        for i in 0..vs.len() {
            for j in 0..vs.len() {
                let orth = i != j && space.pairing(vs[i].coords(), vs[j].coords()) == 0;
                assert_eq!(g.adjacent(i, j), orth);
            }
        }
    }
}

#[test]
fn dimension_constant_matches_rank_of_complement() {
    let cases = [
        (PolarFamily::UE, 2, 2, 3, 14),
        (PolarFamily::UE, 3, 2, 2, 69),
        (PolarFamily::UE, 4, 2, 5, 220),
        (PolarFamily::UE, 2, 3, 3, 230),
        (PolarFamily::O, 3, 2, 2, 9),
        (PolarFamily::O, 5, 2, 2, 25),
        (PolarFamily::O, 3, 3, 2, 90),
    ];
    for (fam, q, m, l, x) in cases {
        let i = inst(fam, q, m);
        assert_eq!(dimension_constant(&i), Some(BigInt::from(x)), "{i}");
        let g = build_graph(fam, i.q, m).unwrap();
        let a = g.adjacency_matrix();
        let n = a.rows();
        let mut c = IntegerMatrix::zeros(n, n);
        for r in 0..n {
            for s in 0..n {
                c.set(r, s, 1 - a.get(r, s));
            }
        }
        assert_eq!(snf::rank_mod_prime(&c, l) as i64 - 1, x, "{i} at l={l}");
    }
}

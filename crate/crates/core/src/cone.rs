//! Polyhedral cones over the integers: double description, facets, pulling
//! triangulations and lattice points of half-open parallelepipeds.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactlat::{smith, subsets, IntMatrix};
use crate::rational::{dot_i64, primitive, primitive_from_rats, rat_int, to_i64, Rat};

/// Rank of a list of integer vectors (fraction-free elimination in `i128`).
pub fn rank_i64(vectors: &[&[i64]]) -> usize {
    let Some(first) = vectors.first() else { return 0 };
    let dim = first.len();
    let mut rows: Vec<Vec<i128>> = vectors.iter().map(|v| v.iter().map(|&x| x as i128).collect()).collect();
    let mut rank = 0;
    for c in 0..dim {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(rank, p);
        for i in rank + 1..rows.len() {
            if rows[i][c] == 0 {
                continue;
            }
            let (a, b) = (rows[rank][c], rows[i][c]);
            let g = a.gcd(&b);
            let (fa, fb) = (a / g, b / g);
            let pivot = rows[rank].clone();
            let row = &mut rows[i];
            for j in c..dim {
                row[j] = row[j] * fa - pivot[j] * fb;
            }
            let g = row.iter().fold(0i128, |g, x| g.gcd(x));
            if g > 1 {
                row.iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Primitive generator of the orthogonal complement of `dim - 1` vectors of
/// rank `dim - 1`, via signed maximal minors.
pub fn normal_vector(vectors: &[&[i64]], dim: usize) -> Option<Vec<i64>> {
    assert_eq!(vectors.len() + 1, dim);
    let m = IntMatrix::from_rows(&vectors.iter().map(|v| v.to_vec()).collect::<Vec<_>>(), dim);
    let mut out = Vec::with_capacity(dim);
    for j in 0..dim {
        let cols: Vec<usize> = (0..dim).filter(|&c| c != j).collect();
        let minor = m.select_cols(&cols).det();
        let v = to_i64(&minor);
        out.push(if j % 2 == 0 { v } else { -v });
    }
    if out.iter().all(|&x| x == 0) {
        None
    } else {
        Some(primitive(&out))
    }
}

/// Facet normals of the full-dimensional cone generated by `gens`, by brute
/// force over `(dim-1)`-subsets. Normals are inward: `<n, g> >= 0` on all `gens`.
pub fn facets_by_subsets(gens: &[Vec<i64>], dim: usize) -> Vec<Vec<i64>> {
    if dim == 0 {
        return Vec::new();
    }
    if dim == 1 {
        let pos = gens.iter().any(|g| g[0] > 0);
        let neg = gens.iter().any(|g| g[0] < 0);
        return match (pos, neg) {
            (true, false) => vec![vec![1]],
            (false, true) => vec![vec![-1]],
            _ => Vec::new(),
        };
    }
    let mut found = BTreeSet::new();
    for s in subsets(gens.len(), dim - 1) {
        let vs: Vec<&[i64]> = s.iter().map(|&i| gens[i].as_slice()).collect();
        let Some(n) = normal_vector(&vs, dim) else { continue };
        let vals: Vec<i64> = gens.iter().map(|g| dot_i64(&n, g)).collect();
        let pos = vals.iter().any(|&v| v > 0);
        let neg = vals.iter().any(|&v| v < 0);
        if pos && !neg {
            found.insert(n);
        } else if neg && !pos {
            found.insert(n.iter().map(|x| -x).collect());
        }
    }
    found.into_iter().collect()
}

/// Extreme rays of the pointed cone `{x : <a, x> >= 0 for a in ineqs}` by
/// incremental double description with the algebraic adjacency test.
/// Returns `None` when the inequalities do not span (cone not pointed).
pub fn rays_from_inequalities(ineqs: &[Vec<i64>], dim: usize) -> Option<Vec<Vec<i64>>> {
    if dim == 0 {
        return Some(Vec::new());
    }
    // Greedy basis among the inequalities.
    let mut basis: Vec<usize> = Vec::new();
    for i in 0..ineqs.len() {
        let mut trial: Vec<&[i64]> = basis.iter().map(|&b| ineqs[b].as_slice()).collect();
        trial.push(&ineqs[i]);
        if rank_i64(&trial) == trial.len() {
            basis.push(i);
            if basis.len() == dim {
                break;
            }
        }
    }
    if basis.len() < dim {
        return None;
    }
    let bm = IntMatrix::from_rows(&basis.iter().map(|&b| ineqs[b].clone()).collect::<Vec<_>>(), dim);
    let inv = bm.inverse_rat().expect("basis is invertible");
    let mut rays: Vec<Vec<i64>> = (0..dim)
        .map(|j| primitive_from_rats(&(0..dim).map(|i| inv[i][j].clone()).collect::<Vec<Rat>>()))
        .collect();
    let mut processed: Vec<usize> = basis.clone();
    for (idx, a) in ineqs.iter().enumerate() {
        if basis.contains(&idx) {
            continue;
        }
        let vals: Vec<i64> = rays.iter().map(|r| dot_i64(a, r)).collect();
        let mut next: Vec<Vec<i64>> = Vec::new();
        for (r, &v) in rays.iter().zip(&vals) {
            if v >= 0 {
                next.push(r.clone());
            }
        }
        for (i, p) in rays.iter().enumerate() {
            if vals[i] <= 0 {
                continue;
            }
            for (j, n) in rays.iter().enumerate() {
                if vals[j] >= 0 {
                    continue;
                }
                let common: Vec<&[i64]> = processed
                    .iter()
                    .map(|&k| ineqs[k].as_slice())
                    .filter(|ineq| dot_i64(ineq, p) == 0 && dot_i64(ineq, n) == 0)
                    .collect();
                if common.len() + 2 < dim || rank_i64(&common) != dim - 2 {
                    continue;
                }
                let r: Vec<i64> = (0..dim).map(|k| vals[i] * n[k] - vals[j] * p[k]).collect();
                next.push(primitive(&r));
            }
        }
        next.sort();
        next.dedup();
        rays = next;
        processed.push(idx);
    }
    rays.sort();
    Some(rays)
}

/// Facets of the face spanned by `face` (indices into `rays`), each given as a
/// sorted index set, using the supporting inequalities.
fn facets_of_face(face: &[usize], rays: &[Vec<i64>], ineqs: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let vs: Vec<&[i64]> = face.iter().map(|&i| rays[i].as_slice()).collect();
    let k = rank_i64(&vs);
    let mut out = BTreeSet::new();
    for a in ineqs {
        let sub: Vec<usize> = face.iter().copied().filter(|&i| dot_i64(a, &rays[i]) == 0).collect();
        if sub.len() == face.len() {
            continue;
        }
        let sv: Vec<&[i64]> = sub.iter().map(|&i| rays[i].as_slice()).collect();
        if rank_i64(&sv) + 1 == k {
            out.insert(sub);
        }
    }
    out.into_iter().collect()
}

/// Pulling triangulation of the pointed cone with the given rays and
/// inequality description; simplices are sorted index lists into `rays`.
pub fn pulling_triangulation(rays: &[Vec<i64>], ineqs: &[Vec<i64>]) -> Vec<Vec<usize>> {
    fn rec(face: Vec<usize>, rays: &[Vec<i64>], ineqs: &[Vec<i64>], out: &mut Vec<Vec<usize>>) {
        let vs: Vec<&[i64]> = face.iter().map(|&i| rays[i].as_slice()).collect();
        if rank_i64(&vs) == face.len() {
            out.push(face);
            return;
        }
        let apex = face[0];
        for f in facets_of_face(&face, rays, ineqs) {
            if f.contains(&apex) {
                continue;
            }
            let mut sub = Vec::new();
            rec(f, rays, ineqs, &mut sub);
            for mut s in sub {
                s.push(apex);
                s.sort();
                out.push(s);
            }
        }
    }
    let mut out = Vec::new();
    rec((0..rays.len()).collect(), rays, ineqs, &mut out);
    out
}

/// Lattice points `sum l_i v_i` with every `l_i` in `(0, 1]` for linearly
/// independent integer vectors `v_i` (the columns of `gens`).
pub fn open_parallelepiped_points(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let k = gens.len();
    if k == 0 {
        return vec![Vec::new()];
    }
    let dim = gens[0].len();
    let v = IntMatrix::from_cols(gens, dim);
    let sm = smith(&v);
    let diag: Vec<i64> = sm.diagonal().iter().map(to_i64).collect();
    assert!(diag.len() == k && diag.iter().all(|&s| s > 0), "generators are not independent");
    let mut out = Vec::new();
    let total: i64 = diag.iter().product();
    for mut code in 0..total {
        let mut y = vec![0i64; dim];
        for i in 0..k {
            y[i] = code % diag[i];
            code /= diag[i];
        }
        // lambda = W S^{-1} y, then move each coordinate into (0, 1].
        let mut lam: Vec<Rat> = vec![Rat::zero(); k];
        for (i, l) in lam.iter_mut().enumerate() {
            for j in 0..k {
                *l += rat_int(sm.v.get(i, j)) * Rat::new(y[j].into(), diag[j].into());
            }
        }
        for l in lam.iter_mut() {
            let c = l.ceil();
            *l = l.clone() - c + Rat::one();
        }
        let p: Vec<i64> = (0..dim)
            .map(|r| {
                let mut s = Rat::zero();
                for (i, l) in lam.iter().enumerate() {
                    s += l * Rat::from_integer(gens[i][r].into());
                }
                assert!(s.is_integer());
                to_i64(&s.to_integer())
            })
            .collect();
        out.push(p);
    }
    out.sort();
    out
}

/// All faces (as sorted index subsets, including the empty face) of the
/// simplices of a triangulation.
pub fn all_faces(simplices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut set = BTreeSet::new();
    for s in simplices {
        let k = s.len();
        for mask in 0u64..(1u64 << k) {
            let f: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| s[i]).collect();
            set.insert(f);
        }
    }
    set.into_iter().collect()
}

/// Absolute determinant of a square list of integer vectors.
pub fn abs_det(vectors: &[Vec<i64>]) -> i64 {
    let n = vectors.len();
    let m = IntMatrix::from_rows(vectors, n);
    to_i64(&m.det().abs())
}

/// `true` when `x` is in the cone described by inward normals.
pub fn in_cone(x: &[i64], normals: &[Vec<i64>]) -> bool {
    normals.iter().all(|n| dot_i64(n, x) >= 0)
}

//! Random instance generators and brute-force oracles shared by the
//! integration tests. Oracles use only plain arithmetic and nalgebra.
#![allow(dead_code)]

use fitzcalc::{GridSpec, PointF64, Region};
use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn pt(x: &[f64], xs: &[f64]) -> PointF64 {
    PointF64::new(x.to_vec(), xs.to_vec()).unwrap()
}

pub fn p1(x: f64, xs: f64) -> PointF64 {
    PointF64::scalar(x, xs)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn c_of(z: &PointF64) -> f64 {
    dot(z.x(), z.xstar())
}

pub fn gap_of(z: &PointF64, w: &PointF64) -> f64 {
    let dx: Vec<f64> = z.x().iter().zip(w.x()).map(|(a, b)| a - b).collect();
    let dy: Vec<f64> = z.xstar().iter().zip(w.xstar()).map(|(a, b)| a - b).collect();
    dot(&dx, &dy)
}

/// Most negative pairwise gap, or 0 for fewer than two points.
pub fn worst_gap(pts: &[PointF64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, z) in pts.iter().enumerate() {
        for w in &pts[i + 1..] {
            worst = worst.min(gap_of(z, w));
        }
    }
    worst
}

/// `max_w (z·w − c(w))` over a finite graph.
pub fn phi_oracle(graph: &[PointF64], z: &PointF64) -> f64 {
    graph
        .iter()
        .map(|w| dot(z.x(), w.xstar()) + dot(w.x(), z.xstar()) - c_of(w))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Lower envelope of `(w, c(w))` at `z` by enumerating supports of at most
/// `2n + 1` points and solving for barycentric weights.
pub fn psi_oracle(graph: &[PointF64], z: &PointF64) -> f64 {
    let d = 2 * z.dim();
    let target: Vec<f64> = z.flat().into_iter().chain([1.0]).collect();
    let b = DVector::from_vec(target);
    let mut best = f64::INFINITY;
    for size in 1..=(d + 1).min(graph.len()) {
        for subset in (0..graph.len()).combinations(size) {
            let cols: Vec<Vec<f64>> = subset.iter().map(|&i| graph[i].flat()).collect();
            let a = DMatrix::from_fn(d + 1, size, |r, c| if r < d { cols[c][r] } else { 1.0 });
            let Ok(lam) = a.clone().svd(true, true).solve(&b, 1e-13) else {
                continue;
            };
            if (&a * &lam - &b).amax() > 1e-10 || lam.iter().any(|&l| l < -1e-12) {
                continue;
            }
            let v: f64 = subset.iter().zip(lam.iter()).map(|(&i, l)| l * c_of(&graph[i])).sum();
            best = best.min(v);
        }
    }
    best
}

pub fn primal_axis(g: &GridSpec<f64>) -> Vec<f64> {
    Region::ambient(1).grid_sample(g).into_iter().map(|x| x[0]).collect()
}

/// For `n = 1` the `(x, x*)` grid; for `n = 2` the six coordinate planes
/// through the origin of `(x1, x2, x1*, x2*)`, each a full product of axes.
pub fn plane_grid(n: usize, g: &GridSpec<f64>) -> Vec<PointF64> {
    let primal = primal_axis(g);
    let dual = g.dual_axis();
    let axis = |k: usize| if k < n { &primal } else { &dual };
    let mut out = Vec::new();
    for (i, j) in (0..2 * n).tuple_combinations() {
        for &a in axis(i) {
            for &b in axis(j) {
                let mut v = vec![0.0; 2 * n];
                v[i] = a;
                v[j] = b;
                out.push(PointF64::from_flat(&v).unwrap());
            }
        }
    }
    out
}

/// A monotone finite graph with 3..=8 points and coordinates in [-2, 2].
/// Half of the draws snap coordinates to the pinned lattice so that band
/// points land on the grid.
pub fn monotone_graph(rng: &mut ChaCha8Rng, n: usize, g: &GridSpec<f64>) -> Vec<PointF64> {
    loop {
        let pts = draw_graph(rng, n, g);
        if pts.len() >= 3 {
            return pts;
        }
    }
}

fn draw_graph(rng: &mut ChaCha8Rng, n: usize, g: &GridSpec<f64>) -> Vec<PointF64> {
    let k = rng.gen_range(3..=8);
    let snap = rng.gen_bool(0.5);
    let primal = primal_axis(g);
    let dual: Vec<f64> = g.dual_axis().into_iter().filter(|v| v.abs() <= 2.0).collect();
    let draw_x = |rng: &mut ChaCha8Rng| {
        if snap {
            *primal.choose(rng).unwrap()
        } else {
            rng.gen_range(-2.0..=2.0)
        }
    };
    let mut pts = Vec::new();
    if n == 1 {
        let mut xs: Vec<f64> = (0..k).map(|_| draw_x(rng)).collect();
        let mut ys: Vec<f64> = (0..k)
            .map(|_| if snap { *dual.choose(rng).unwrap() } else { rng.gen_range(-2.0..=2.0) })
            .collect();
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        for (x, y) in xs.into_iter().zip(ys) {
            pts.push(p1(x, y));
        }
    } else {
        // subgradients of a max of affine pieces
        let pieces: Vec<([f64; 2], f64)> = (0..rng.gen_range(2..=4))
            .map(|_| {
                let a = if snap {
                    [*dual.choose(rng).unwrap(), *dual.choose(rng).unwrap()]
                } else {
                    [rng.gen_range(-2.0..=2.0), rng.gen_range(-2.0..=2.0)]
                };
                (a, rng.gen_range(-1.0..=1.0))
            })
            .collect();
        for _ in 0..k {
            let x = [draw_x(rng), draw_x(rng)];
            let (a, _) = pieces
                .iter()
                .max_by(|p, q| (dot(&p.0, &x) + p.1).total_cmp(&(dot(&q.0, &x) + q.1)))
                .unwrap();
            pts.push(pt(&x, a));
        }
    }
    pts.sort_by(|a, b| a.flat().partial_cmp(&b.flat()).unwrap());
    pts.dedup();
    pts
}

/// The same primals with the duals permuted until some pair has gap below
/// `-margin`; `None` if no permutation tried breaks monotonicity.
pub fn shuffled(rng: &mut ChaCha8Rng, graph: &[PointF64], margin: f64) -> Option<Vec<PointF64>> {
    let mut duals: Vec<Vec<f64>> = graph.iter().map(|w| w.xstar().to_vec()).collect();
    for _ in 0..64 {
        duals.shuffle(rng);
        let cand: Vec<PointF64> = graph.iter().zip(&duals).map(|(w, d)| pt(w.x(), d)).collect();
        if worst_gap(&cand) < -margin {
            return Some(cand);
        }
    }
    None
}

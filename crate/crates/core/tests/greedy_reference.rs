//! The greedy matcher against a line-by-line brute-force version.

use gtn_core::labeling::{label_greedy_cosine, label_greedy_cosine_with, GreedyOptions};
use gtn_core::rng::RngState;
use gtn_core::{LabeledDataset, PointSet};

type Pairs = Vec<(Vec<f64>, Vec<f64>)>;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na <= 1e-12 || nb <= 1e-12 {
        return 0.0;
    }
    a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>() / (na * nb)
}

/// Sort both by norm, walk y, take the first x whose cosine is within
/// `tol` of the best one, remove it.
fn reference(xs: &[Vec<f64>], ys: &[Vec<f64>], tol: f64) -> Pairs {
    let mut xs = xs.to_vec();
    let mut ys = ys.to_vec();
    xs.sort_by(|a, b| norm(a).total_cmp(&norm(b)));
    ys.sort_by(|a, b| norm(a).total_cmp(&norm(b)));
    let mut pairs = Vec::new();
    for y in ys {
        let mut best = f64::NEG_INFINITY;
        for x in &xs {
            let c = cosine(x, &y).clamp(-1.0, 1.0);
            if c > best {
                best = c;
            }
        }
        let mut pick = 0;
        for (i, x) in xs.iter().enumerate() {
            if cosine(x, &y).clamp(-1.0, 1.0) >= best - tol {
                pick = i;
                break;
            }
        }
        pairs.push((y, xs.remove(pick)));
    }
    pairs
}

fn pairs_of(l: &LabeledDataset) -> Pairs {
    l.sources.rows().zip(l.targets.rows()).map(|(y, x)| (y.to_vec(), x.to_vec())).collect()
}

fn random_rows(rng: &mut RngState, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.normal()).collect()).collect()
}

fn to_points(rows: &[Vec<f64>]) -> PointSet {
    let d = rows[0].len();
    PointSet::from_flat(d, rows.concat()).unwrap()
}

#[test]
fn matches_reference_on_small_instances() {
    let mut rng = RngState::new(20);
    for trial in 0..1000 {
        let n = 1 + rng.below(8) as usize;
        let d = 1 + rng.below(4) as usize;
        let xs = random_rows(&mut rng, n, d);
        let ys = random_rows(&mut rng, n, d);
        for tol in [0.0, 1e-4, 0.3] {
            let opts = GreedyOptions { tie_tolerance: tol, ..GreedyOptions::default() };
            let got = pairs_of(&label_greedy_cosine_with(&to_points(&xs), &to_points(&ys), &opts).unwrap());
            assert_eq!(got, reference(&xs, &ys, tol), "trial {trial} n {n} d {d} tol {tol}");
        }
    }
}

#[test]
fn four_point_line_matches_reference() {
    let xs = vec![vec![-2.0, 0.0], vec![-1.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
    let ys = vec![vec![-0.5, 0.0], vec![0.4, 0.0], vec![-1.5, 0.0], vec![1.4, 0.0]];
    let got = pairs_of(&label_greedy_cosine(&to_points(&xs), &to_points(&ys)).unwrap());
    assert_eq!(got, reference(&xs, &ys, 1e-4));
    assert_eq!(got[0], (vec![0.4, 0.0], vec![1.0, 0.0]));
}

#[test]
fn common_ray_is_rank_matching() {
    let mut rng = RngState::new(4);
    for _ in 0..200 {
        let n = 1 + rng.below(8) as usize;
        let dir = [0.6, -0.8];
        let ray = |r: f64| vec![r * dir[0], r * dir[1]];
        let xs: Vec<Vec<f64>> = (0..n).map(|_| ray(0.01 + rng.uniform() * 5.0)).collect();
        let ys: Vec<Vec<f64>> = (0..n).map(|_| ray(0.01 + rng.uniform() * 5.0)).collect();
        let got = pairs_of(&label_greedy_cosine(&to_points(&xs), &to_points(&ys)).unwrap());
        assert_eq!(got, reference(&xs, &ys, 1e-4));
        let mut sx = xs.clone();
        let mut sy = ys.clone();
        sx.sort_by(|a, b| norm(a).total_cmp(&norm(b)));
        sy.sort_by(|a, b| norm(a).total_cmp(&norm(b)));
        assert_eq!(got, sy.into_iter().zip(sx).collect::<Pairs>());
    }
}

#[test]
fn rays_stay_separate_and_rank_matched() {
    let m = 8;
    let per_ray = 50;
    let mut rng = RngState::new(8);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 0..m {
        let a = k as f64 * std::f64::consts::TAU / m as f64;
        for _ in 0..per_ray {
            let r = 0.05 + rng.uniform() * 3.0;
            xs.push(vec![r * a.cos(), r * a.sin()]);
            let r = 0.05 + rng.uniform() * 3.0;
            ys.push(vec![r * a.cos(), r * a.sin()]);
        }
    }
    let ray_of = |p: &[f64]| {
        let a = p[1].atan2(p[0]).rem_euclid(std::f64::consts::TAU);
        ((a / (std::f64::consts::TAU / m as f64)).round() as usize) % m
    };
    let got = pairs_of(&label_greedy_cosine(&to_points(&xs), &to_points(&ys)).unwrap());
    for k in 0..m {
        let on_ray: Vec<&(Vec<f64>, Vec<f64>)> = got.iter().filter(|(y, _)| ray_of(y) == k).collect();
        assert_eq!(on_ray.len(), per_ray);
        for (y, x) in &on_ray {
            assert_eq!(ray_of(x), ray_of(y));
        }
        // y arrives in norm order, so the matched x norms must increase too
        for w in on_ray.windows(2) {
            assert!(norm(&w[0].0) <= norm(&w[1].0));
            assert!(norm(&w[0].1) < norm(&w[1].1));
        }
    }
}

#[test]
fn row_order_does_not_change_pairs() {
    let mut rng = RngState::new(31);
    for _ in 0..20 {
        let n = 2 + rng.below(60) as usize;
        let xs = random_rows(&mut rng, n, 3);
        let ys = random_rows(&mut rng, n, 3);
        let base = pairs_of(&label_greedy_cosine(&to_points(&xs), &to_points(&ys)).unwrap());
        let px: Vec<Vec<f64>> = rng.permutation(n).into_iter().map(|i| xs[i].clone()).collect();
        let py: Vec<Vec<f64>> = rng.permutation(n).into_iter().map(|i| ys[i].clone()).collect();
        let shuffled = pairs_of(&label_greedy_cosine(&to_points(&px), &to_points(&py)).unwrap());
        assert_eq!(base, shuffled);
    }
}

#[test]
fn every_target_used_once() {
    let mut rng = RngState::new(12);
    let xs = random_rows(&mut rng, 500, 2);
    let ys = random_rows(&mut rng, 500, 2);
    let got = label_greedy_cosine(&to_points(&xs), &to_points(&ys)).unwrap();
    let key = |v: &[f64]| v.iter().map(|a| a.to_bits()).collect::<Vec<u64>>();
    let mut want: Vec<Vec<u64>> = xs.iter().map(|r| key(r)).collect();
    let mut have: Vec<Vec<u64>> = got.targets.rows().map(key).collect();
    want.sort();
    have.sort();
    assert_eq!(want, have);
    let mut src_want: Vec<Vec<u64>> = ys.iter().map(|r| key(r)).collect();
    let mut src_have: Vec<Vec<u64>> = got.sources.rows().map(key).collect();
    src_want.sort();
    src_have.sort();
    assert_eq!(src_want, src_have);
}

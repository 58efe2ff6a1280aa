//! Reference implementations written straight from the scoring formulas,
//! kept independent of the library code they check.

#![allow(dead_code)]

pub mod fuzz;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use upsell_core::domain::{ItemId, RatingsMatrix, ReservationNumber};
use upsell_core::recommend::SimilarityKind;

/// A dense grid with its labels. `cells[u][i]` is guest `u`'s stars for item `i`.
pub struct Grid {
    pub users: Vec<String>,
    pub items: Vec<String>,
    pub cells: Vec<Vec<Option<u8>>>,
}

impl Grid {
    pub fn matrix(&self) -> RatingsMatrix {
        RatingsMatrix::from_cells(
            self.users.iter().map(|u| ReservationNumber::new(u).unwrap()).collect(),
            self.items.iter().map(|i| ItemId::new(i).unwrap()).collect(),
            self.cells.clone(),
        )
        .unwrap()
    }

    pub fn density(&self) -> f64 {
        let total = self.users.len() * self.items.len();
        let rated = self.cells.iter().flatten().filter(|c| c.is_some()).count();
        rated as f64 / total as f64
    }
}

/// Random grid of at most 5 guests × 6 items with density ≥ 0.4. Labels are
/// shuffled so label order and storage order disagree.
pub fn random_grid(rng: &mut ChaCha8Rng) -> Grid {
    loop {
        let n_users = rng.gen_range(2..=5);
        let n_items = rng.gen_range(2..=6);
        let fill = rng.gen_range(0.4..=1.0);
        let cells: Vec<Vec<Option<u8>>> = (0..n_users)
            .map(|_| {
                (0..n_items)
                    .map(|_| rng.gen_bool(fill).then(|| rng.gen_range(1..=5)))
                    .collect()
            })
            .collect();
        let mut users: Vec<String> = (0..n_users).map(|u| format!("{}", 100 + u * 7)).collect();
        let mut items: Vec<String> = (0..n_items).map(|i| format!("W{i}")).collect();
        for k in (1..users.len()).rev() {
            users.swap(k, rng.gen_range(0..=k));
        }
        for k in (1..items.len()).rev() {
            items.swap(k, rng.gen_range(0..=k));
        }
        let grid = Grid { users, items, cells };
        if grid.density() >= 0.4 {
            return grid;
        }
    }
}

fn avg(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

fn user_mean(g: &Grid, u: usize) -> Option<f64> {
    let xs: Vec<f64> = g.cells[u].iter().flatten().map(|&s| f64::from(s)).collect();
    avg(&xs)
}

fn item_mean(g: &Grid, i: usize) -> Option<f64> {
    let xs: Vec<f64> = g.cells.iter().filter_map(|row| row[i]).map(f64::from).collect();
    avg(&xs)
}

/// Similarity from explicit (x, y, axis_mean) triples of co-rated positions.
fn sim_from_pairs(pairs: &[(f64, f64, f64)], kind: SimilarityKind, min_overlap: usize) -> Option<f64> {
    if pairs.is_empty() || pairs.len() < min_overlap {
        return None;
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (cx, cy): (Vec<f64>, Vec<f64>) = match kind {
        SimilarityKind::Cosine => (xs, ys),
        SimilarityKind::Pearson => {
            let (mx, my) = (avg(&xs).unwrap(), avg(&ys).unwrap());
            (
                xs.iter().map(|x| x - mx).collect(),
                ys.iter().map(|y| y - my).collect(),
            )
        }
        SimilarityKind::AdjustedCosine => (
            pairs.iter().map(|p| p.0 - p.2).collect(),
            pairs.iter().map(|p| p.1 - p.2).collect(),
        ),
    };
    let num: f64 = cx.iter().zip(&cy).map(|(a, b)| a * b).sum();
    let sx: f64 = cx.iter().map(|a| a * a).sum();
    let sy: f64 = cy.iter().map(|b| b * b).sum();
    if sx == 0.0 || sy == 0.0 {
        return None;
    }
    Some((num / (sx * sy).sqrt()).clamp(-1.0, 1.0))
}

pub fn user_sim(g: &Grid, u: usize, v: usize, kind: SimilarityKind, min_overlap: usize) -> Option<f64> {
    let pairs: Vec<(f64, f64, f64)> = (0..g.items.len())
        .filter_map(|i| {
            let (a, b) = (g.cells[u][i]?, g.cells[v][i]?);
            Some((f64::from(a), f64::from(b), item_mean(g, i).unwrap()))
        })
        .collect();
    sim_from_pairs(&pairs, kind, min_overlap)
}

pub fn item_sim(g: &Grid, i: usize, j: usize, kind: SimilarityKind, min_overlap: usize) -> Option<f64> {
    let pairs: Vec<(f64, f64, f64)> = (0..g.users.len())
        .filter_map(|u| {
            let (a, b) = (g.cells[u][i]?, g.cells[u][j]?);
            Some((f64::from(a), f64::from(b), user_mean(g, u).unwrap()))
        })
        .collect();
    sim_from_pairs(&pairs, kind, min_overlap)
}

/// r̂(u,i) = μ_u + Σ s(u,v)(r_vi − μ_v) / Σ|s(u,v)| over the top-k positive
/// neighbors who rated `i`; ties go to the smaller reservation label.
pub fn uucf(g: &Grid, u: usize, i: usize, k: usize, kind: SimilarityKind, min_overlap: usize) -> Option<f64> {
    let mu_u = user_mean(g, u)?;
    let mut cand: Vec<(f64, &str, usize)> = Vec::new();
    for v in 0..g.users.len() {
        if v == u || g.cells[v][i].is_none() {
            continue;
        }
        if let Some(s) = user_sim(g, u, v, kind, min_overlap) {
            if s > 0.0 {
                cand.push((s, g.users[v].as_str(), v));
            }
        }
    }
    cand.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(b.1)));
    let top = &cand[..cand.len().min(k)];
    if top.is_empty() {
        return None;
    }
    let num: f64 = top
        .iter()
        .map(|&(s, _, v)| s * (f64::from(g.cells[v][i].unwrap()) - user_mean(g, v).unwrap()))
        .sum();
    let den: f64 = top.iter().map(|t| t.0.abs()).sum();
    Some((mu_u + num / den).clamp(1.0, 5.0))
}

/// r̂(u,i) = μ_i + Σ s(i,j)(r_uj − μ_j) / Σ|s(i,j)| over the top-k positive
/// neighbor items `u` rated; ties go to the smaller item label.
pub fn iicf(g: &Grid, u: usize, i: usize, k: usize, kind: SimilarityKind, min_overlap: usize) -> Option<f64> {
    let mu_i = item_mean(g, i)?;
    let mut cand: Vec<(f64, &str, usize)> = Vec::new();
    for j in 0..g.items.len() {
        if j == i || g.cells[u][j].is_none() {
            continue;
        }
        if let Some(s) = item_sim(g, i, j, kind, min_overlap) {
            if s > 0.0 {
                cand.push((s, g.items[j].as_str(), j));
            }
        }
    }
    cand.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(b.1)));
    let top = &cand[..cand.len().min(k)];
    if top.is_empty() {
        return None;
    }
    let num: f64 = top
        .iter()
        .map(|&(s, _, j)| s * (f64::from(g.cells[u][j].unwrap()) - item_mean(g, j).unwrap()))
        .sum();
    let den: f64 = top.iter().map(|t| t.0.abs()).sum();
    Some((mu_i + num / den).clamp(1.0, 5.0))
}

/// Largest disagreement between two optional predictions; `INFINITY` when
/// one side is defined and the other is not.
pub fn gap(a: Option<f64>, b: Option<f64>) -> f64 {
    match (a, b) {
        (None, None) => 0.0,
        (Some(x), Some(y)) => (x - y).abs(),
        _ => f64::INFINITY,
    }
}

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game_model::{FiniteTypeGame, PolytopeSet, TypeCharacteristic, TypeCost};
use crate::linalg::{Matrix, Vector};

use super::{compute_delta, compute_epsilon, ApproxMetrics, ApproxOptions, Partition, Region};

/// Parameters of one quadrature point: stacked set right-hand side and packed
/// `(S, r)`.
struct Sample {
    theta: f64,
    piece: usize,
    params: Vec<f64>,
}

/// Meshgrid approximation: split the box of parameter ranges into `ν` cells
/// per parameter, group the quadrature points `θⱼ = (j + ½)/n` by cell, and
/// give each occupied cell one type with the cell-averaged parameters.
///
/// Parameters that are constant over `[0, 1]` are not split, so the grid has
/// `ν^k` cells with `k` the number of varying parameters.
pub fn build_meshgrid(
    tc: &TypeCharacteristic,
    nu: usize,
    constraint: Option<PolytopeSet>,
    options: &ApproxOptions,
) -> Result<(FiniteTypeGame, ApproxMetrics)> {
    if nu == 0 {
        return Err(Error::contract("nu must be at least 1"));
    }
    let n = options.theta_samples;
    if n == 0 {
        return Err(Error::contract("theta_samples must be positive"));
    }
    let t = tc.dim();
    let n_rhs = tc.num_rhs();

    let samples: Vec<Sample> = (0..n)
        .map(|j| {
            let theta = (j as f64 + 0.5) / n as f64;
            let piece = tc.piece_index(theta);
            let mut params: Vec<f64> = tc.rhs_in_piece(piece, theta).iter().copied().collect();
            params.extend(tc.cost_in_piece(piece, theta).packed_params().iter());
            Sample {
                theta,
                piece,
                params,
            }
        })
        .collect();

    let dims = n_rhs + tc.num_utility_params();
    let mut lo = vec![f64::INFINITY; dims];
    let mut hi = vec![f64::NEG_INFINITY; dims];
    for s in &samples {
        for (k, &v) in s.params.iter().enumerate() {
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    let varying: Vec<usize> = (0..dims)
        .filter(|&k| hi[k] - lo[k] > 1e-14 * (1.0 + lo[k].abs().max(hi[k].abs())))
        .collect();
    let cells = (nu as u128)
        .checked_pow(varying.len() as u32)
        .unwrap_or(u128::MAX);
    if cells > options.cell_cap {
        return Err(Error::MeshgridTooFine {
            cells,
            cap: options.cell_cap,
        });
    }

    // group samples by cell, types ordered by first occurrence in θ
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (j, s) in samples.iter().enumerate() {
        let key: Vec<usize> = varying
            .iter()
            .map(|&k| {
                let u = (s.params[k] - lo[k]) / (hi[k] - lo[k]) * nu as f64;
                (u.floor().max(0.0) as usize).min(nu - 1)
            })
            .collect();
        let next = members.len();
        let cell = *index.entry(key).or_insert(next);
        if cell == next {
            members.push(Vec::new());
        }
        members[cell].push(j);
    }

    let mut masses = Vec::with_capacity(members.len());
    let mut sets = Vec::with_capacity(members.len());
    let mut costs: Vec<TypeCost> = Vec::with_capacity(members.len());
    let mut regions = Vec::with_capacity(members.len());
    for cell in &members {
        let count = cell.len() as f64;
        let mut mean = vec![0.0; dims];
        for &j in cell {
            for (k, v) in samples[j].params.iter().enumerate() {
                mean[k] += v;
            }
        }
        mean.iter_mut().for_each(|v| *v /= count);
        masses.push(count / n as f64);
        sets.push(tc.set_from_rhs(&Vector::from_column_slice(&mean[..n_rhs]))?);
        let packed = &mean[n_rhs..];
        let s = Matrix::from_row_slice(t, t, &packed[..t * t]);
        let r = Vector::from_column_slice(&packed[t * t..]);
        costs.push(tc.cost_from_utility(s, r).into());
        regions.push(Region {
            intervals: merge_cells(cell, n),
            probes: cell.iter().map(|&j| (samples[j].piece, samples[j].theta)).collect(),
        });
    }

    let game = FiniteTypeGame::new(masses, sets, costs, constraint)?;
    let partition = Partition { regions };
    let (delta_bar, delta_provenance) = compute_delta(&game, tc, &partition)?;
    let (eps_bar, eps_provenance) = compute_epsilon(&game, tc, &partition)?;
    let metrics = ApproxMetrics {
        nu,
        num_types: game.num_types(),
        delta_bar,
        delta_provenance,
        eps_bar,
        eps_provenance,
        d: 0.0,
        partition,
    };
    Ok((game, metrics))
}

/// Union of the quadrature intervals `[j/n, (j+1)/n]` of the listed samples,
/// as sorted disjoint intervals.
fn merge_cells(indices: &[usize], n: usize) -> Vec<(f64, f64)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &j in indices {
        match out.last_mut() {
            Some((_, end)) if *end == j => *end = j + 1,
            _ => out.push((j, j + 1)),
        }
    }
    out.into_iter()
        .map(|(a, b)| (a as f64 / n as f64, b as f64 / n as f64))
        .collect()
}

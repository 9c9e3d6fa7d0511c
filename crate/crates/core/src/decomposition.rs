//! Decomposition of the pair entropy H(Z) into spatial mutual information
//! MI(Z,W) and residual entropy H(Z)_W, where W is the distance class of a
//! pair.
//!
//! The marginal `p(z_r)` is pooled from the class-conditional counts, so
//! `MI + H(Z)_W = H(Z)` and `PI(Z|w_k) >= 0` hold exactly up to rounding.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::DistanceClassList;
use crate::model::{CategoricalData, Window};
use crate::shannon::{entropy, tally_couples, PairFrequencyTable};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionResult {
    /// MI(Z,W).
    pub mut_global: f64,
    /// H(Z)_W.
    pub res_global: f64,
    /// H(Z) of the pooled pair distribution.
    pub shann_z: f64,
    /// PI(Z|w_k) per class.
    pub mut_local: Vec<f64>,
    /// H(Z|w_k) per class.
    pub res_local: Vec<f64>,
    /// p(w_k) = Q_k / Q.
    pub pwk: Vec<f64>,
    pub pzr_marg: Vec<f64>,
    pub pzr_cond: Vec<Vec<f64>>,
    pub q: u64,
    pub qk: Vec<u64>,
    pub breaks: Vec<f64>,
    /// Labels of the Z categories, aligned with `pzr_marg`.
    pub z_categories: Vec<(String, String)>,
}

/// One row of the proportional profile: shares of PI and H within a class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    /// 1-based class index.
    pub class: usize,
    pub pi_share: f64,
    pub h_share: f64,
}

/// Breaks `0, 2, 4, 10, diagonal`, dropping inner breaks beyond the diagonal.
pub fn default_breaks(window: &Window) -> Vec<f64> {
    let diag = window.diagonal();
    let mut b: Vec<f64> = [0.0, 2.0, 4.0, 10.0].into_iter().filter(|&x| x < diag).collect();
    b.push(diag);
    b
}

pub fn spatial_decomposition(values: &CategoricalData, classes: &DistanceClassList) -> Result<DecompositionResult> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientUnits(n));
    }
    if classes.n() != n {
        return Err(Error::Mismatch { data: n, structure: classes.n() });
    }
    let n_cat = values.n_categories();
    let tables: Vec<PairFrequencyTable> = classes
        .classes()
        .par_iter()
        .map(|adj| {
            let square = tally_couples(values.codes(), n_cat, adj.pairs());
            PairFrequencyTable::from_square(square, values.categories().to_vec(), false)
        })
        .collect();

    let r = tables.first().map_or(0, PairFrequencyTable::space_size);
    let qk: Vec<u64> = tables.iter().map(PairFrequencyTable::total).collect();
    let q: u64 = qk.iter().sum();
    if q == 0 {
        return Err(Error::NoPairs);
    }
    let empty: Vec<usize> = qk.iter().enumerate().filter(|(_, &c)| c == 0).map(|(k, _)| k + 1).collect();
    if !empty.is_empty() {
        log::warn!("empty distance classes {empty:?} contribute zero weight");
    }

    let mut pooled = vec![0u64; r];
    for t in &tables {
        pooled.iter_mut().zip(t.counts()).for_each(|(a, &b)| *a += b);
    }
    let pzr_marg: Vec<f64> = pooled.iter().map(|&c| c as f64 / q as f64).collect();
    let pwk: Vec<f64> = qk.iter().map(|&c| c as f64 / q as f64).collect();

    let mut mut_local = Vec::with_capacity(tables.len());
    let mut res_local = Vec::with_capacity(tables.len());
    let mut pzr_cond = Vec::with_capacity(tables.len());
    for t in &tables {
        let cond = t.proportions();
        let pi: f64 = cond
            .iter()
            .zip(&pzr_marg)
            .filter(|(&pc, _)| pc > 0.0)
            .map(|(&pc, &pm)| pc * (pc / pm).ln())
            .sum();
        mut_local.push(pi);
        res_local.push(entropy(&cond));
        pzr_cond.push(cond);
    }
    let mut_global = pwk.iter().zip(&mut_local).map(|(w, pi)| w * pi).sum();
    let res_global = pwk.iter().zip(&res_local).map(|(w, h)| w * h).sum();

    let z_categories = tables
        .first()
        .map(|t| {
            t.z_categories()
                .into_iter()
                .map(|(a, b)| (values.categories()[a].clone(), values.categories()[b].clone()))
                .collect()
        })
        .unwrap_or_default();

    Ok(DecompositionResult {
        mut_global,
        res_global,
        shann_z: entropy(&pzr_marg),
        mut_local,
        res_local,
        pwk,
        pzr_marg,
        pzr_cond,
        q,
        qk,
        breaks: classes.breaks().to_vec(),
        z_categories,
    })
}

/// `MI(Z,W) / H(Z)`, clamped to `[0, 1]` against rounding.
pub fn mi_proportion(result: &DecompositionResult) -> Result<f64> {
    if !(result.shann_z > 0.0) {
        return Err(Error::UndefinedProportion);
    }
    Ok((result.mut_global / result.shann_z).clamp(0.0, 1.0))
}

/// Per-class shares of `PI(Z|w_k)` and `H(Z|w_k)` after scaling their sum
/// to 1. Classes where both vanish are skipped.
pub fn proportional_profile(result: &DecompositionResult) -> Vec<ProfileRow> {
    result
        .mut_local
        .iter()
        .zip(&result.res_local)
        .enumerate()
        .filter_map(|(k, (&pi, &h))| {
            let total = pi + h;
            (total > 0.0).then(|| ProfileRow { class: k + 1, pi_share: pi / total, h_share: h / total })
        })
        .collect()
}

//! Normally ordered click moments and the matrices built from them.
//!
//! A click histogram determines every moment `⟨:m̂_A^{l_A} m̂_B^{l_B}:⟩` with
//! `l_A ≤ N_A`, `l_B ≤ N_B` through the weights `C(N − k, l) / C(N, l)`: the
//! probability that `l` bins drawn without replacement all avoid the `k`
//! bins that clicked.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::clickmodel::{ClickStatistics, DetectorResponse};
use crate::error::{Error, Result};
use crate::numerics::{binomial_ratio, NeumaierSum, SymmetricMatrix};
use crate::states::PhotonDistribution;

/// `⟨:m̂_A^{l_A} m̂_B^{l_B}:⟩` for all `l_A ≤ N_A`, `l_B ≤ N_B`, row-major in `l_A`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    bins_a: u32,
    bins_b: u32,
    values: Vec<f64>,
}

impl MomentTable {
    pub fn new(bins_a: u32, bins_b: u32, values: Vec<f64>) -> Result<Self> {
        if values.len() != (bins_a as usize + 1) * (bins_b as usize + 1) {
            return Err(Error::domain("moment table size does not match its bin counts"));
        }
        Ok(Self {
            bins_a,
            bins_b,
            values,
        })
    }

    pub fn bins_a(&self) -> u32 {
        self.bins_a
    }

    pub fn bins_b(&self) -> u32 {
        self.bins_b
    }

    pub fn get(&self, l_a: u32, l_b: u32) -> f64 {
        self.values[l_a as usize * (self.bins_b as usize + 1) + l_b as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Sampling weight `C(N − k, l) / C(N, l)` of click outcome `k` for moment order `l`.
pub fn click_weight(bins: u32, k: u32, l: u32) -> f64 {
    binomial_ratio(bins - k, l, bins).expect("k and l never exceed the bin count")
}

/// All weights for one arm as `w[k][l]`.
pub(crate) fn weight_table(bins: u32) -> Vec<Vec<f64>> {
    (0..=bins)
        .map(|k| (0..=bins).map(|l| click_weight(bins, k, l)).collect())
        .collect()
}

/// Moments read directly off a click histogram.
///
/// Every entry is divided by the histogram total; entry `(0, 0)` is set to exactly 1.
pub fn sample_moments(stats: &ClickStatistics) -> MomentTable {
    let (bins_a, bins_b) = (stats.bins_a(), stats.bins_b());
    let wa = weight_table(bins_a);
    let wb = weight_table(bins_b);
    let total: f64 = stats.probs().iter().copied().collect::<NeumaierSum>().value();
    let nb = bins_b as usize + 1;

    // Contract over k_B first, then over k_A.
    let mut partial = vec![0.0; (bins_a as usize + 1) * nb];
    for ka in 0..=bins_a as usize {
        for lb in 0..nb {
            let mut acc = NeumaierSum::new();
            for kb in 0..nb {
                acc.add(wb[kb][lb] * stats.probs()[ka * nb + kb]);
            }
            partial[ka * nb + lb] = acc.value();
        }
    }
    let mut values = vec![0.0; partial.len()];
    for la in 0..=bins_a as usize {
        for lb in 0..nb {
            let mut acc = NeumaierSum::new();
            for ka in 0..=bins_a as usize {
                acc.add(wa[ka][la] * partial[ka * nb + lb]);
            }
            values[la * nb + lb] = acc.value() / total;
        }
    }
    values[0] = 1.0;
    MomentTable {
        bins_a,
        bins_b,
        values,
    }
}

fn single_mode_moments(p: &crate::states::PhotonNumbers, d: &DetectorResponse) -> Vec<f64> {
    let mass = p.retained_mass();
    (0..=d.bins())
        .map(|l| {
            let acc: NeumaierSum = p
                .probs()
                .iter()
                .enumerate()
                .map(|(n, w)| w * d.no_click_moment(l, n))
                .collect();
            acc.value() / mass
        })
        .collect()
}

/// Moments evaluated on the state itself, with no click histogram involved:
/// `Σ_n p(n) e^{−ν_A l_A − ν_B l_B} (1 − η_A l_A/N_A)ⁿ (1 − η_B l_B/N_B)ⁿ`
/// for correlated states and products of single-mode sums otherwise.
pub fn direct_moments(
    p: &PhotonDistribution,
    da: &DetectorResponse,
    db: &DetectorResponse,
) -> MomentTable {
    let (bins_a, bins_b) = (da.bins(), db.bins());
    let values = match p {
        PhotonDistribution::CorrelatedDiagonal(pn) => {
            let mass = pn.retained_mass();
            let mut values = Vec::with_capacity((bins_a as usize + 1) * (bins_b as usize + 1));
            for la in 0..=bins_a {
                for lb in 0..=bins_b {
                    let x = da.silent_fraction(la) * db.silent_fraction(lb);
                    let acc: NeumaierSum = pn
                        .probs()
                        .iter()
                        .enumerate()
                        .map(|(n, w)| w * libm::pow(x, n as f64))
                        .collect();
                    let dark = libm::exp(-da.nu() * f64::from(la) - db.nu() * f64::from(lb));
                    values.push(dark * acc.value() / mass);
                }
            }
            values
        }
        PhotonDistribution::Product(pa, pb) => {
            let ma = single_mode_moments(pa, da);
            let mb = single_mode_moments(pb, db);
            ma.iter().flat_map(|x| mb.iter().map(move |y| x * y)).collect()
        }
    };
    MomentTable {
        bins_a,
        bins_b,
        values,
    }
}

/// Untruncated moments of the two-mode squeezed vacuum.
///
/// With `s = sinh²ξ` the photon-number generating function of the state is
/// `Σ p(n) zⁿ = 1 / (1 + s (1 − z))`, which sums the geometric series of
/// [`direct_moments`] in closed form. Stays cheap at squeezing levels where
/// an explicit truncation would need millions of terms.
pub fn tmsv_moments(xi: f64, da: &DetectorResponse, db: &DetectorResponse) -> Result<MomentTable> {
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::domain(format!("squeezing parameter must be >= 0, got {xi}")));
    }
    let sh = libm::sinh(xi);
    let s = sh * sh;
    let mut values = Vec::with_capacity((da.bins() as usize + 1) * (db.bins() as usize + 1));
    for la in 0..=da.bins() {
        for lb in 0..=db.bins() {
            let z = da.silent_fraction(la) * db.silent_fraction(lb);
            let dark = libm::exp(-da.nu() * f64::from(la) - db.nu() * f64::from(lb));
            values.push(dark / (1.0 + s * (1.0 - z)));
        }
    }
    MomentTable::new(da.bins(), db.bins(), values)
}

/// Which exponent pairs `(s_A, s_B)` index the rows of a moment matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexScheme {
    /// `s_A ≤ K_A/2`, `s_B ≤ K_B/2` and `s_A + s_B ≤ max(K_A, K_B)/2`.
    /// For `(2, 2)` this is the 3×3 matrix over `1, m̂_A, m̂_B`.
    #[default]
    TotalDegree,
    /// Every pair with `s_A ≤ K_A/2`, `s_B ≤ K_B/2`.
    Rectangular,
}

/// Row labels of `M^{(K_A, K_B)}` in graded order: by total degree
/// `s_A + s_B`, then by descending `s_A`. The `(2, 2)` rows are therefore
/// `(0,0), (1,0), (0,1)`, i.e. `1, m̂_A, m̂_B`.
pub fn moment_index_set(k_a: u32, k_b: u32, scheme: IndexScheme) -> Vec<(u32, u32)> {
    let cap = k_a.max(k_b) / 2;
    let mut out = Vec::new();
    for degree in 0..=(k_a / 2 + k_b / 2) {
        if scheme == IndexScheme::TotalDegree && degree > cap {
            break;
        }
        for sa in (0..=degree.min(k_a / 2)).rev() {
            let sb = degree - sa;
            if sb <= k_b / 2 {
                out.push((sa, sb));
            }
        }
    }
    out
}

/// Symmetric matrix `(⟨:m̂_A^{s_A+t_A} m̂_B^{s_B+t_B}:⟩)` with its row labels.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    pub order: (u32, u32),
    pub matrix: SymmetricMatrix,
    pub index_map: Vec<(u32, u32)>,
}

pub(crate) fn check_orders(k_a: u32, k_b: u32, bins_a: u32, bins_b: u32) -> Result<()> {
    if !k_a.is_multiple_of(2) || !k_b.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "moment orders must be even, got ({k_a}, {k_b})"
        )));
    }
    if k_a > bins_a || k_b > bins_b {
        return Err(Error::domain(format!(
            "moment order ({k_a}, {k_b}) exceeds the bin counts ({bins_a}, {bins_b})"
        )));
    }
    Ok(())
}

/// `M^{(K_A, K_B)}` in the default [`IndexScheme`].
pub fn build_matrix(table: &MomentTable, k_a: u32, k_b: u32) -> Result<MomentMatrix> {
    build_matrix_with(table, k_a, k_b, IndexScheme::default())
}

pub fn build_matrix_with(
    table: &MomentTable,
    k_a: u32,
    k_b: u32,
    scheme: IndexScheme,
) -> Result<MomentMatrix> {
    check_orders(k_a, k_b, table.bins_a, table.bins_b)?;
    let index_map = moment_index_set(k_a, k_b, scheme);
    let matrix = SymmetricMatrix::from_fn(index_map.len(), |i, j| {
        let (sa, sb) = index_map[i];
        let (ta, tb) = index_map[j];
        table.get(sa + ta, sb + tb)
    })?;
    Ok(MomentMatrix {
        order: (k_a, k_b),
        matrix,
        index_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clickmodel::{joint_click_distribution, Trials};
    use crate::numerics::min_eigenpair;
    use crate::states::{fock_distribution, tmsv_distribution};

    fn vacuum_stats() -> ClickStatistics {
        let mut probs = vec![0.0; 81];
        probs[0] = 1.0;
        ClickStatistics::new(8, 8, probs, Trials::Finite(100)).unwrap()
    }

    #[test]
    fn vacuum_moments_are_one() {
        let t = sample_moments(&vacuum_stats());
        assert!(t.values().iter().all(|v| *v == 1.0));
        let d = DetectorResponse::new(0.3, 0.0, 8).unwrap();
        let t = direct_moments(&PhotonDistribution::vacuum(), &d, &d);
        assert!(t.values().iter().all(|v| *v == 1.0));
    }

    #[test]
    fn single_photon_moment() {
        let d = DetectorResponse::ideal(8).unwrap();
        let p = PhotonDistribution::CorrelatedDiagonal(fock_distribution(1));
        let t = direct_moments(&p, &d, &d);
        assert_eq!(t.get(1, 0), 0.875);
    }

    #[test]
    fn tmsv_truncated_matches_closed_form() {
        let d = DetectorResponse::new(0.096, 0.51, 8).unwrap();
        for xi in [0.25, 1.0, 1.75] {
            let p = tmsv_distribution(xi, 1e-14).unwrap();
            let truncated = direct_moments(&p, &d, &d);
            let closed = tmsv_moments(xi, &d, &d).unwrap();
            for (a, b) in truncated.values().iter().zip(closed.values()) {
                assert!((a - b).abs() < 1e-12, "xi={xi}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn standard_layouts() {
        let d = DetectorResponse::new(0.096, 0.51, 8).unwrap();
        let t = tmsv_moments(1.0, &d, &d).unwrap();
        let m20 = build_matrix(&t, 2, 0).unwrap();
        assert_eq!(
            m20.matrix.to_rows(),
            vec![vec![1.0, t.get(1, 0)], vec![t.get(1, 0), t.get(2, 0)]]
        );
        let m22 = build_matrix(&t, 2, 2).unwrap();
        let (a, b, a2, b2, ab) = (t.get(1, 0), t.get(0, 1), t.get(2, 0), t.get(0, 2), t.get(1, 1));
        assert_eq!(
            m22.matrix.to_rows(),
            vec![vec![1.0, a, b], vec![a, a2, ab], vec![b, ab, b2]]
        );
        assert_eq!(m22.index_map, vec![(0, 0), (1, 0), (0, 1)]);
    }

    #[test]
    fn index_sets() {
        assert_eq!(moment_index_set(8, 8, IndexScheme::TotalDegree).len(), 15);
        assert_eq!(moment_index_set(8, 8, IndexScheme::Rectangular).len(), 25);
        assert_eq!(moment_index_set(8, 0, IndexScheme::TotalDegree).len(), 5);
        assert_eq!(moment_index_set(0, 0, IndexScheme::TotalDegree), vec![(0, 0)]);
    }

    #[test]
    fn vacuum_matrix_is_rank_one() {
        let t = sample_moments(&vacuum_stats());
        let m = build_matrix(&t, 2, 2).unwrap();
        assert!(m.matrix.to_rows().iter().flatten().all(|x| *x == 1.0));
        assert!(min_eigenpair(&m.matrix).unwrap().value.abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_orders() {
        let t = sample_moments(&vacuum_stats());
        assert!(build_matrix(&t, 3, 2).is_err());
        assert!(build_matrix(&t, 10, 0).is_err());
    }

    #[test]
    fn sampled_equals_direct_for_tmsv() {
        let d = DetectorResponse::new(0.096, 0.51, 8).unwrap();
        let p = tmsv_distribution(1.0, 1e-12).unwrap();
        let s = joint_click_distribution(&p, &d, &d).unwrap();
        let sampled = sample_moments(&s);
        assert_eq!(sampled.get(0, 0), 1.0);
        for (a, b) in sampled.values().iter().zip(direct_moments(&p, &d, &d).values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

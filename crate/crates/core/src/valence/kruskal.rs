use libm::erfc;

use super::ValenceError;

/// Result of a two-sample Kruskal-Wallis test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KruskalWallis {
    /// Tie-corrected H statistic.
    pub h: f64,
    /// Upper tail of the chi-square distribution with one degree of freedom.
    pub p: f64,
    pub mean_rank_a: f64,
    pub mean_rank_b: f64,
}

/// Upper tail probability of chi-square with one degree of freedom.
pub fn chi_square_1_sf(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        erfc((x / 2.0).sqrt()).clamp(0.0, 1.0)
    }
}

/// Kruskal-Wallis from per-value counts, supplied in ascending value order.
/// Each item is `(count in a, count in b)` for one distinct value.
pub(crate) fn from_tallies<I>(tallies: I) -> KruskalWallis
where
    I: IntoIterator<Item = (u64, u64)>,
{
    let mut n_a = 0u64;
    let mut n_b = 0u64;
    let mut rank_sum_a = 0.0;
    let mut rank_sum_b = 0.0;
    let mut tie_term = 0.0;
    let mut seen = 0u64;
    for (ca, cb) in tallies {
        let t = ca + cb;
        if t == 0 {
            continue;
        }
        // positions seen+1 ..= seen+t share the midrank
        let midrank = seen as f64 + (t as f64 + 1.0) / 2.0;
        rank_sum_a += ca as f64 * midrank;
        rank_sum_b += cb as f64 * midrank;
        let tf = t as f64;
        tie_term += tf * tf * tf - tf;
        seen += t;
        n_a += ca;
        n_b += cb;
    }
    let n = (n_a + n_b) as f64;
    let mean_rank_a = rank_sum_a / n_a as f64;
    let mean_rank_b = rank_sum_b / n_b as f64;
    let correction = 1.0 - tie_term / (n * n * n - n);
    if correction <= f64::EPSILON {
        return KruskalWallis {
            h: 0.0,
            p: 1.0,
            mean_rank_a,
            mean_rank_b,
        };
    }
    // deviation form: exactly zero when both mean ranks equal (N+1)/2
    let centre = (n + 1.0) / 2.0;
    let spread =
        n_a as f64 * (mean_rank_a - centre).powi(2) + n_b as f64 * (mean_rank_b - centre).powi(2);
    let h = (12.0 / (n * (n + 1.0)) * spread / correction).max(0.0);
    KruskalWallis {
        h,
        p: chi_square_1_sf(h),
        mean_rank_a,
        mean_rank_b,
    }
}

/// Two-group Kruskal-Wallis test with midranks and tie correction.
/// When every pooled value is tied the result is `h = 0, p = 1`.
pub fn kruskal_wallis_two_group(a: &[f64], b: &[f64]) -> Result<KruskalWallis, ValenceError> {
    if a.is_empty() || b.is_empty() {
        return Err(ValenceError::EmptyGroup);
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(ValenceError::NonFinite);
    }
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&x| (x, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut tallies = Vec::new();
    let mut i = 0;
    while i < pooled.len() {
        let value = pooled[i].0;
        let (mut ca, mut cb) = (0u64, 0u64);
        while i < pooled.len() && pooled[i].0 == value {
            if pooled[i].1 {
                ca += 1;
            } else {
                cb += 1;
            }
            i += 1;
        }
        tallies.push((ca, cb));
    }
    Ok(from_tallies(tallies))
}

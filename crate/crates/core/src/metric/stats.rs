use serde::{Deserialize, Serialize};

/// Box-plot summary. All fields except `count` are absent for an empty input.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Stats {
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub median: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
}

/// Quantile `q ∈ [0, 1]` of sorted data, linearly interpolated between order
/// statistics at position `q·(n−1)`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn aggregate_stats(entries: &[f64]) -> Stats {
    if entries.is_empty() {
        return Stats::default();
    }
    let mut sorted = entries.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Stats {
        count: n,
        mean: Some(entries.iter().sum::<f64>() / n as f64),
        median: Some(quantile_sorted(&sorted, 0.5)),
        q1: Some(quantile_sorted(&sorted, 0.25)),
        q3: Some(quantile_sorted(&sorted, 0.75)),
        min: Some(sorted[0]),
        max: Some(sorted[n - 1]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn five_values() {
        let s = aggregate_stats(&[5.0, 1.0, 4.0, 2.0, 3.0]);
        assert_eq!(s.count, 5);
        assert_eq!(
            (s.mean, s.median, s.q1, s.q3, s.min, s.max),
            (
                Some(3.0),
                Some(3.0),
                Some(2.0),
                Some(4.0),
                Some(1.0),
                Some(5.0)
            )
        );
    }

    #[test]
    fn interpolates_between_order_statistics() {
        let s = aggregate_stats(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.median, Some(2.5));
        assert_eq!(s.q1, Some(1.75));
        assert_eq!(s.q3, Some(3.25));
    }

    #[test]
    fn empty_has_count_only() {
        let s = aggregate_stats(&[]);
        assert_eq!(s.count, 0);
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"count":0}"#);
    }

    #[test]
    fn uniform_median() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let m = aggregate_stats(&v).median.unwrap();
        assert!((m - 0.5).abs() < 0.02, "{m}");
    }
}

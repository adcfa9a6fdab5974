use serde::{Deserialize, Serialize};

use super::chamfer::SampledShape;
use crate::element::{ElementClass, MapElement};
use crate::error::{Error, Result};

/// A predicted map element with its detection score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPrediction")]
pub struct Prediction {
    #[serde(flatten)]
    pub element: MapElement,
    pub confidence: f64,
}

#[derive(Deserialize)]
struct RawPrediction {
    #[serde(flatten)]
    element: MapElement,
    #[serde(default = "default_confidence")]
    confidence: f64,
}

fn default_confidence() -> f64 {
    1.0
}

impl TryFrom<RawPrediction> for Prediction {
    type Error = Error;
    fn try_from(raw: RawPrediction) -> Result<Self> {
        Prediction::new(raw.element, raw.confidence)
    }
}

impl Prediction {
    pub fn new(element: MapElement, confidence: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::InvalidMap(format!(
                "confidence of {:?} must be in [0, 1], got {confidence}",
                element.id
            )));
        }
        Ok(Self {
            element,
            confidence,
        })
    }

    pub fn class(&self) -> ElementClass {
        self.element.class
    }
}

/// Minimum-cost assignment of rows to columns of a rectangular cost matrix.
///
/// Returns `result[row] = Some(col)`; every row is assigned when there are
/// at least as many columns as rows, otherwise every column is. Costs must be
/// finite.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<Option<usize>> {
    let n = cost.len();
    let m = cost.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return vec![None; n];
    }
    if n > m {
        let transposed: Vec<Vec<f64>> = (0..m)
            .map(|j| (0..n).map(|i| cost[i][j]).collect())
            .collect();
        let mut out = vec![None; n];
        for (j, i) in hungarian(&transposed).into_iter().enumerate() {
            if let Some(i) = i {
                out[i] = Some(j);
            }
        }
        return out;
    }

    // Shortest augmenting paths with row/column potentials, 1-based with a
    // virtual column 0.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut row_of = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut min_v = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < min_v[j] {
                    min_v[j] = cur;
                    way[j] = j0;
                }
                if min_v[j] < delta {
                    delta = min_v[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_v[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![None; n];
    for j in 1..=m {
        if row_of[j] != 0 {
            out[row_of[j] - 1] = Some(j - 1);
        }
    }
    out
}

/// Optimal assignment that never pairs entries costing more than `reject`.
///
/// Forbidden pairs are priced above any sum of allowed costs, so the result
/// first maximizes the number of allowed pairs and then minimizes their total
/// cost. Returns `(row, col, cost)` triples in row order.
pub fn assign(cost: &[Vec<f64>], reject: Option<f64>) -> Vec<(usize, usize, f64)> {
    let allowed = |c: f64| reject.is_none_or(|r| c <= r);
    let penalty = 1.0 + cost.iter().flatten().filter(|&&c| allowed(c)).sum::<f64>();
    let priced: Vec<Vec<f64>> = cost
        .iter()
        .map(|row| {
            row.iter()
                .map(|&c| if allowed(c) { c } else { penalty })
                .collect()
        })
        .collect();
    hungarian(&priced)
        .into_iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| (i, j, cost[i][j])))
        .filter(|&(_, _, c)| allowed(c))
        .collect()
}

/// Result of [`match_elements`]; indices refer to the input slices.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Assignment {
    /// `(gt index, other index, chamfer)` in GT order.
    pub pairs: Vec<(usize, usize, f64)>,
    pub unmatched_gt: Vec<usize>,
    pub unmatched_other: Vec<usize>,
}

impl Assignment {
    pub fn total_cost(&self) -> f64 {
        self.pairs.iter().map(|p| p.2).sum()
    }
}

/// Per class, the one-to-one assignment of `others` to `gts` minimizing the
/// total chamfer distance.
pub fn match_elements(gts: &[MapElement], others: &[MapElement]) -> Assignment {
    let gt_shapes: Vec<SampledShape> = gts.iter().map(|e| SampledShape::new(&e.geometry)).collect();
    let other_shapes: Vec<SampledShape> = others
        .iter()
        .map(|e| SampledShape::new(&e.geometry))
        .collect();
    let mut out = Assignment::default();
    let mut other_used = vec![false; others.len()];
    let mut gt_used = vec![false; gts.len()];
    for class in ElementClass::ALL {
        let gi: Vec<usize> = (0..gts.len()).filter(|&i| gts[i].class == class).collect();
        let oi: Vec<usize> = (0..others.len())
            .filter(|&j| others[j].class == class)
            .collect();
        if gi.is_empty() || oi.is_empty() {
            continue;
        }
        let cost: Vec<Vec<f64>> = gi
            .iter()
            .map(|&i| {
                oi.iter()
                    .map(|&j| gt_shapes[i].chamfer(&other_shapes[j]))
                    .collect()
            })
            .collect();
        for (r, c, d) in assign(&cost, None) {
            out.pairs.push((gi[r], oi[c], d));
            gt_used[gi[r]] = true;
            other_used[oi[c]] = true;
        }
    }
    out.pairs.sort_by_key(|p| p.0);
    out.unmatched_gt = (0..gts.len()).filter(|&i| !gt_used[i]).collect();
    out.unmatched_other = (0..others.len()).filter(|&j| !other_used[j]).collect();
    out
}

/// [`match_elements`] against predictions.
pub fn match_predictions(gts: &[MapElement], preds: &[Prediction]) -> Assignment {
    let others: Vec<MapElement> = preds.iter().map(|p| p.element.clone()).collect();
    match_elements(gts, &others)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Polyline;

    fn at_y(id: &str, y: f64) -> MapElement {
        MapElement::new(
            id,
            ElementClass::Boundary,
            Polyline::new(vec![[0.0, y].into(), [10.0, y].into()]).unwrap(),
        )
    }

    fn brute_min(cost: &[Vec<f64>]) -> f64 {
        fn rec(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == cost.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..used.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[row][j] + rec(cost, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        rec(cost, 0, &mut vec![false; cost[0].len()])
    }

    #[test]
    fn hungarian_matches_exhaustive_search() {
        let mut s = 12345u64;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for n in 1..=5 {
            for m in n..=6 {
                for _ in 0..20 {
                    let cost: Vec<Vec<f64>> = (0..n)
                        .map(|_| (0..m).map(|_| next() * 10.0).collect())
                        .collect();
                    let a = hungarian(&cost);
                    let total: f64 = a.iter().enumerate().map(|(i, j)| cost[i][j.unwrap()]).sum();
                    assert!((total - brute_min(&cost)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn wide_and_tall_matrices() {
        let tall = vec![vec![1.0], vec![0.5], vec![3.0]];
        assert_eq!(hungarian(&tall), vec![None, Some(0), None]);
        assert!(hungarian(&[]).is_empty());
    }

    #[test]
    fn reject_bound_prefers_allowed_pairs() {
        // Diagonal is cheap overall but (0,0) is forbidden.
        let cost = vec![vec![5.0, 1.0], vec![0.1, 4.0]];
        assert_eq!(assign(&cost, Some(2.0)), vec![(0, 1, 1.0), (1, 0, 0.1)]);
        let cost = vec![vec![5.0, 6.0]];
        assert!(assign(&cost, Some(2.0)).is_empty());
    }

    #[test]
    fn crossed_assignment() {
        let gts = [at_y("g0", 0.0), at_y("g1", 10.0)];
        let preds = [at_y("p0", 10.1), at_y("p1", 0.1)];
        let a = match_elements(&gts, &preds);
        assert_eq!(
            a.pairs.iter().map(|p| (p.0, p.1)).collect::<Vec<_>>(),
            vec![(0, 1), (1, 0)]
        );
        assert!(a.unmatched_gt.is_empty() && a.unmatched_other.is_empty());
    }

    #[test]
    fn classes_never_mix_and_leftovers_listed() {
        let mut other = at_y("c", 0.0);
        other.class = ElementClass::Centerline;
        let a = match_elements(&[at_y("g", 0.0)], &[other]);
        assert!(a.pairs.is_empty());
        assert_eq!((a.unmatched_gt, a.unmatched_other), (vec![0], vec![0]));
        let a = match_elements(&[at_y("g", 0.0)], &[]);
        assert_eq!(a.unmatched_gt, vec![0]);
    }

    #[test]
    fn confidence_validated() {
        assert!(Prediction::new(at_y("p", 0.0), 1.2).is_err());
        let p: Prediction =
            serde_json::from_str(r#"{"id":"a","class":"boundary","points":[[0,0],[1,0]]}"#)
                .unwrap();
        assert_eq!(p.confidence, 1.0);
    }
}

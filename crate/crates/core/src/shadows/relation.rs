use serde::{Deserialize, Serialize};

use super::{ShadowError, ShadowLabel};

/// Boolean matrix linking source shadows to the destination shadows an
/// undetected evader can reach during one motion.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(into = "RelationRepr", try_from = "RelationRepr")]
pub struct InfluenceRelation {
    cols: usize,
    /// One row per source shadow, as a mask over destination shadows.
    reach: Vec<ShadowLabel>,
}

impl InfluenceRelation {
    pub fn empty(rows: usize, cols: usize) -> Self {
        InfluenceRelation { cols, reach: vec![ShadowLabel::all_clear(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n, n);
        for i in 0..n {
            r.set(i, i, true);
        }
        r
    }

    pub fn from_matrix(rows: usize, cols: usize, matrix: &[Vec<bool>]) -> Result<Self, ShadowError> {
        if matrix.len() != rows {
            return Err(ShadowError::LengthMismatch { expected: rows, found: matrix.len() });
        }
        let mut r = Self::empty(rows, cols);
        for (a, row) in matrix.iter().enumerate() {
            if row.len() != cols {
                return Err(ShadowError::LengthMismatch { expected: cols, found: row.len() });
            }
            r.reach[a] = ShadowLabel::from_bits(row);
        }
        Ok(r)
    }

    pub fn rows(&self) -> usize {
        self.reach.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn reachable(&self, a: usize, b: usize) -> bool {
        self.reach[a].get(b)
    }

    pub fn set(&mut self, a: usize, b: usize, value: bool) {
        self.reach[a].set(b, value);
    }

    pub fn to_matrix(&self) -> Vec<Vec<bool>> {
        self.reach.iter().map(ShadowLabel::bits).collect()
    }

    /// Contamination after the motion: shadow `b` is contaminated iff some
    /// contaminated source shadow reaches it.
    pub fn propagate(&self, label: &ShadowLabel) -> Result<ShadowLabel, ShadowError> {
        if label.len() != self.rows() {
            return Err(ShadowError::LengthMismatch { expected: self.rows(), found: label.len() });
        }
        let mut out = ShadowLabel::all_clear(self.cols);
        for a in label.contaminated() {
            out.or_assign(&self.reach[a]);
        }
        Ok(out)
    }

    /// Relation of `self` followed by `next`.
    pub fn compose(&self, next: &InfluenceRelation) -> Result<InfluenceRelation, ShadowError> {
        if self.cols != next.rows() {
            return Err(ShadowError::LengthMismatch { expected: self.cols, found: next.rows() });
        }
        let reach = self.reach.iter().map(|row| next.propagate(row)).collect::<Result<_, _>>()?;
        Ok(InfluenceRelation { cols: next.cols, reach })
    }

    pub fn transpose(&self) -> InfluenceRelation {
        let mut t = Self::empty(self.cols, self.rows());
        for a in 0..self.rows() {
            for b in self.reach[a].contaminated() {
                t.set(b, a, true);
            }
        }
        t
    }
}

#[derive(Clone, Serialize, Deserialize)]
struct RelationRepr {
    rows: usize,
    cols: usize,
    reachable: Vec<String>,
}

impl From<InfluenceRelation> for RelationRepr {
    fn from(r: InfluenceRelation) -> Self {
        RelationRepr { rows: r.rows(), cols: r.cols, reachable: r.reach.iter().map(|l| l.to_string()).collect() }
    }
}

impl TryFrom<RelationRepr> for InfluenceRelation {
    type Error = ShadowError;

    fn try_from(r: RelationRepr) -> Result<Self, ShadowError> {
        let reach = r.reachable.iter().map(|s| s.parse::<ShadowLabel>()).collect::<Result<Vec<_>, _>>()?;
        if reach.len() != r.rows {
            return Err(ShadowError::LengthMismatch { expected: r.rows, found: reach.len() });
        }
        if let Some(bad) = reach.iter().find(|l| l.len() != r.cols) {
            return Err(ShadowError::LengthMismatch { expected: r.cols, found: bad.len() });
        }
        Ok(InfluenceRelation { cols: r.cols, reach })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l(s: &str) -> ShadowLabel {
        s.parse().unwrap()
    }

    #[test]
    fn propagate_examples() {
        let full = InfluenceRelation::from_matrix(2, 2, &[vec![true, true], vec![true, true]]).unwrap();
        assert_eq!(full.propagate(&l("00")).unwrap(), l("00"));
        assert_eq!(full.propagate(&l("11")).unwrap(), l("11"));
        let swap = InfluenceRelation::from_matrix(2, 2, &[vec![false, true], vec![true, false]]).unwrap();
        assert_eq!(swap.propagate(&l("10")).unwrap(), l("01"));
        assert!(matches!(swap.propagate(&l("1")), Err(ShadowError::LengthMismatch { expected: 2, found: 1 })));
    }

    #[test]
    fn empty_relation() {
        let r = InfluenceRelation::empty(0, 0);
        assert_eq!(r.propagate(&ShadowLabel::all_clear(0)).unwrap().len(), 0);
    }

    #[test]
    fn compose_and_transpose() {
        let a = InfluenceRelation::from_matrix(1, 2, &[vec![true, false]]).unwrap();
        let b = InfluenceRelation::from_matrix(2, 3, &[vec![false, true, true], vec![true, false, false]]).unwrap();
        let c = a.compose(&b).unwrap();
        assert_eq!(c.to_matrix(), vec![vec![false, true, true]]);
        assert_eq!(c.transpose().to_matrix(), vec![vec![false], vec![true], vec![true]]);
        assert!(b.compose(&a).is_err());
    }

    #[test]
    fn json_round_trip() {
        let r = InfluenceRelation::from_matrix(2, 3, &[vec![false, true, true], vec![true, false, false]]).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":3,"reachable":["011","100"]}"#);
        assert_eq!(serde_json::from_str::<InfluenceRelation>(&s).unwrap(), r);
        assert!(serde_json::from_str::<InfluenceRelation>(r#"{"rows":1,"cols":3,"reachable":["01"]}"#).is_err());
    }

    fn relation(rows: usize, cols: usize) -> impl Strategy<Value = InfluenceRelation> {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), cols), rows)
            .prop_map(move |m| InfluenceRelation::from_matrix(rows, cols, &m).unwrap())
    }

    fn label(len: usize) -> impl Strategy<Value = ShadowLabel> {
        proptest::collection::vec(any::<bool>(), len).prop_map(|b| ShadowLabel::from_bits(&b))
    }

    proptest! {
        #[test]
        fn propagation_is_monotone(r in relation(6, 5), a in label(6), b in label(6)) {
            if a.dominates(&b).unwrap() {
                let (pa, pb) = (r.propagate(&a).unwrap(), r.propagate(&b).unwrap());
                prop_assert!(pa == pb || pa.dominates(&pb).unwrap());
            }
        }

        #[test]
        fn identity_preserves_labels(a in label(9)) {
            prop_assert_eq!(InfluenceRelation::identity(9).propagate(&a).unwrap(), a);
        }

        #[test]
        fn composition_matches_sequential_propagation(r in relation(4, 3), s in relation(3, 5), a in label(4)) {
            let direct = r.compose(&s).unwrap().propagate(&a).unwrap();
            let stepwise = s.propagate(&r.propagate(&a).unwrap()).unwrap();
            prop_assert_eq!(direct, stepwise);
        }
    }
}

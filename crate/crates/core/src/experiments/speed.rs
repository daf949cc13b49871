use crate::dynamics::Contagion;
use crate::engine::TrialResult;

pub const DEFAULT_SPEED_THRESHOLD: f64 = 0.5;

/// Steps needed to reach a depth threshold. `Censored` sorts after every
/// `Reached` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Speed {
    Reached(u64),
    Censored,
}

impl Speed {
    pub fn steps(self) -> Option<u64> {
        match self {
            Self::Reached(t) => Some(t),
            Self::Censored => None,
        }
    }
}

/// First step at which the cumulative count of `contagion` is at least
/// `threshold_fraction · n`.
pub fn speed_metric(tr: &TrialResult, contagion: Contagion, threshold_fraction: f64) -> Speed {
    assert!(
        threshold_fraction > 0.0 && threshold_fraction < 1.0,
        "threshold must lie in (0,1)"
    );
    let target = threshold_fraction * tr.n as f64;
    tr.series(contagion)
        .iter()
        .position(|&count| count as f64 >= target)
        .map_or(Speed::Censored, |t| Speed::Reached(t as u64))
}

/// Lower median (element `(len - 1) / 2` of the sorted values), treating
/// censored runs as slower than any finished one. `None` for empty input.
pub fn median_speed(speeds: &[Speed]) -> Option<Speed> {
    let mut sorted = speeds.to_vec();
    sorted.sort_unstable();
    sorted.get(sorted.len().checked_sub(1)? / 2).copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::StopReason;

    fn trial(series: Vec<usize>) -> TrialResult {
        TrialResult {
            n: 10,
            final_a: *series.last().unwrap(),
            final_b: *series.last().unwrap(),
            series_b: series.clone(),
            series_a: series,
            steps_run: 0,
            stop_reason: StopReason::Horizon,
        }
    }

    #[test]
    fn jump_is_detected() {
        let tr = trial(vec![1, 1, 1, 10, 10]);
        assert_eq!(speed_metric(&tr, Contagion::A, 0.5), Speed::Reached(3));
    }

    #[test]
    fn capped_series_is_censored() {
        let tr = trial(vec![1, 2, 3, 4]);
        assert_eq!(speed_metric(&tr, Contagion::B, 0.5), Speed::Censored);
        assert_eq!(speed_metric(&tr, Contagion::B, 0.4), Speed::Reached(3));
    }

    #[test]
    fn median_orders_censored_last() {
        use Speed::*;
        assert_eq!(
            median_speed(&[Censored, Reached(4), Reached(9)]),
            Some(Reached(9))
        );
        assert_eq!(
            median_speed(&[Censored, Censored, Reached(1)]),
            Some(Censored)
        );
        assert_eq!(
            median_speed(&[Reached(2), Reached(1), Reached(7), Reached(3)]),
            Some(Reached(2))
        );
        assert_eq!(median_speed(&[]), None);
    }
}

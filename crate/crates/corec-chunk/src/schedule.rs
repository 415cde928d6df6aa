use std::fmt;

use num_integer::Integer;
use thiserror::Error;

/// An eventually periodic sequence of chunk sizes: `prefix` once, then
/// `period` forever. Read as a lower bound on production: after forcing
/// `k` delays at least `cumulative(k)` elements are available.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    prefix: Vec<u64>,
    period: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("a schedule needs a nonempty period")]
    EmptyPeriod,
    #[error("chunk sizes must be at least 1")]
    EmptyChunk,
    #[error("chunk size must be at least 1, found {0}")]
    ZeroModulus(u64),
}

impl Schedule {
    pub fn new(prefix: Vec<u64>, period: Vec<u64>) -> Result<Self, ScheduleError> {
        if period.is_empty() {
            return Err(ScheduleError::EmptyPeriod);
        }
        Ok(Schedule { prefix, period })
    }

    pub fn constant(size: u64) -> Self {
        Schedule { prefix: vec![], period: vec![size] }
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    fn start(&self) -> usize {
        self.prefix.len()
    }

    fn period_sum(&self) -> u64 {
        self.period.iter().sum()
    }

    /// Size of chunk `k`.
    pub fn chunk(&self, k: usize) -> u64 {
        match self.prefix.get(k) {
            Some(&c) => c,
            None => self.period[(k - self.start()) % self.period.len()],
        }
    }

    /// Elements in chunks `0..=k`.
    pub fn cumulative(&self, k: usize) -> u64 {
        if k < self.start() {
            return self.prefix[..=k].iter().sum();
        }
        let base: u64 = self.prefix.iter().sum();
        let (full, part) = (k - self.start() + 1).div_rem(&self.period.len());
        base + full as u64 * self.period_sum() + self.period[..part].iter().sum::<u64>()
    }

    /// True iff every chunk has at least one element.
    pub fn all_nonempty(&self) -> bool {
        self.prefix.iter().chain(&self.period).all(|&c| c > 0)
    }

    /// The first chunk and the schedule of the chunks after it.
    pub fn split_first(&self) -> (u64, Schedule) {
        match self.prefix.split_first() {
            Some((&c, rest)) => (c, Schedule { prefix: rest.to_vec(), period: self.period.clone() }),
            None => {
                let mut period = self.period.clone();
                period.rotate_left(1);
                (self.period[0], Schedule { prefix: vec![], period })
            }
        }
    }

    pub fn with_first(first: u64, rest: &Schedule) -> Schedule {
        let mut prefix = vec![first];
        prefix.extend_from_slice(&rest.prefix);
        Schedule { prefix, period: rest.period.clone() }
    }

    pub fn map_first(&self, f: impl FnOnce(u64) -> u64) -> Schedule {
        let (c, rest) = self.split_first();
        Schedule::with_first(f(c), &rest)
    }

    /// Builds the schedule whose cumulative function is `f`, given that
    /// `f(k + len) - f(k)` is constant for all `k >= start - 1`.
    fn from_cumulative(start: usize, len: usize, f: impl Fn(usize) -> u64) -> Schedule {
        let at = |k: usize| if k == 0 { f(0) } else { f(k) - f(k - 1) };
        Schedule { prefix: (0..start).map(at).collect(), period: (start..start + len).map(at).collect() }
    }

    /// Elements at even positions (`round_up`) or odd positions.
    pub fn halve(&self, round_up: bool) -> Schedule {
        let len = if self.period_sum().is_multiple_of(2) { self.period.len() } else { 2 * self.period.len() };
        Schedule::from_cumulative(self.start(), len, |k| {
            let c = self.cumulative(k);
            if round_up {
                c.div_ceil(2)
            } else {
                c / 2
            }
        })
    }

    /// Output of alternating between `self` and `other`, one element each,
    /// where every boundary of the result consumes one boundary of each side.
    pub fn interleave(&self, other: &Schedule) -> Schedule {
        let a = |k: usize| 2 * self.cumulative(k);
        let b = |k: usize| 2 * other.cumulative(k) + 1;
        let f = |k: usize| a(k).min(b(k));
        let s = self.start().max(other.start());
        let len = self.period.len().lcm(&other.period.len());
        let rate_a = 2 * self.period_sum() * (len / self.period.len()) as u64;
        let rate_b = 2 * other.period_sum() * (len / other.period.len()) as u64;
        if rate_a == rate_b {
            return Schedule::from_cumulative(s, len, f);
        }
        // past some point the slower side is always the minimum
        let (slow, fast): (&dyn Fn(usize) -> u64, &dyn Fn(usize) -> u64) = if rate_a < rate_b { (&a, &b) } else { (&b, &a) };
        let gain = rate_a.abs_diff(rate_b) as i128;
        let lag = (s.saturating_sub(1)..s + len)
            .map(|k| {
                let gap = fast(k) as i128 - slow(k) as i128;
                if gap >= 0 {
                    0
                } else {
                    ((-gap) as u128).div_ceil(gain as u128) as usize
                }
            })
            .max()
            .unwrap_or(0);
        Schedule::from_cumulative(s + lag * len + 1, len, f)
    }

    /// Number of chunks after which both schedules are periodic together.
    fn horizon(&self, other: &Schedule) -> (usize, usize) {
        (self.start().max(other.start()), self.period.len().lcm(&other.period.len()))
    }

    /// First `k` with `self.cumulative(k) < bound.cumulative(k)`, if any.
    pub fn first_shortfall(&self, bound: &Schedule) -> Option<usize> {
        let (s, len) = self.horizon(bound);
        let gap = |k: usize| self.cumulative(k) as i128 - bound.cumulative(k) as i128;
        if let Some(k) = (0..s + len).find(|&k| gap(k) < 0) {
            return Some(k);
        }
        let mine = self.period_sum() as i128 * (len / self.period.len()) as i128;
        let theirs = bound.period_sum() as i128 * (len / bound.period.len()) as i128;
        if mine >= theirs {
            return None;
        }
        let loss = theirs - mine;
        (s..s + len).map(|k| k + ((gap(k) / loss + 1) as usize) * len).min()
    }

    /// Equality as sequences of chunk sizes.
    pub fn same_as(&self, other: &Schedule) -> bool {
        let (s, len) = self.horizon(other);
        (0..s + len).all(|k| self.chunk(k) == other.chunk(k))
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[u64]| xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        write!(f, "pattern[{};{}]", join(&self.prefix), join(&self.period))
    }
}

/// A declared chunk discipline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChunkSignature {
    /// Whether the current chunk already holds an element; later chunks
    /// hold one each.
    Bool(bool),
    /// Chunks of size `m`, the first of size `n`.
    Fixed {
        m: u64,
        n: u64,
    },
    Pattern(Schedule),
}

impl ChunkSignature {
    pub fn fixed(m: u64, n: u64) -> Result<Self, ScheduleError> {
        if m == 0 {
            return Err(ScheduleError::ZeroModulus(m));
        }
        Ok(ChunkSignature::Fixed { m, n })
    }

    pub fn pattern(prefix: Vec<u64>, period: Vec<u64>) -> Result<Self, ScheduleError> {
        let s = Schedule::new(prefix, period)?;
        if !s.all_nonempty() {
            return Err(ScheduleError::EmptyChunk);
        }
        Ok(ChunkSignature::Pattern(s))
    }

    pub fn schedule(&self) -> Schedule {
        match self {
            ChunkSignature::Bool(b) => Schedule { prefix: vec![u64::from(*b)], period: vec![1] },
            ChunkSignature::Fixed { m, n } => Schedule { prefix: vec![*n], period: vec![*m] },
            ChunkSignature::Pattern(s) => s.clone(),
        }
    }

    /// Renders `s` in the same discipline as `self` when it fits.
    pub fn describe(&self, s: &Schedule) -> String {
        let (first, rest) = s.split_first();
        match self {
            ChunkSignature::Bool(_) if first <= 1 && rest.same_as(&Schedule::constant(1)) => ChunkSignature::Bool(first == 1).to_string(),
            ChunkSignature::Fixed { .. } if rest.prefix.is_empty() && rest.period.len() == 1 => {
                format!("({},{first})", rest.period[0])
            }
            _ => s.to_string(),
        }
    }
}

impl fmt::Display for ChunkSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChunkSignature::Bool(b) => write!(f, "bool({b})"),
            ChunkSignature::Fixed { m, n } => write!(f, "({m},{n})"),
            ChunkSignature::Pattern(s) => write!(f, "{s}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched(prefix: &[u64], period: &[u64]) -> Schedule {
        Schedule::new(prefix.to_vec(), period.to_vec()).unwrap()
    }

    fn cumulatives(s: &Schedule, n: usize) -> Vec<u64> {
        (0..n).map(|k| s.cumulative(k)).collect()
    }

    #[test]
    fn cumulative_counts() {
        let s = sched(&[1, 1, 1], &[2]);
        assert_eq!(cumulatives(&s, 6), vec![1, 2, 3, 5, 7, 9]);
        assert_eq!(cumulatives(&sched(&[], &[1, 2]), 4), vec![1, 3, 4, 6]);
    }

    #[test]
    fn first_chunk_edits() {
        let s = sched(&[], &[1, 2]);
        let (c, rest) = s.split_first();
        assert_eq!((c, cumulatives(&rest, 3)), (1, vec![2, 3, 5]));
        assert_eq!(cumulatives(&s.map_first(|c| c + 1), 3), vec![2, 4, 5]);
    }

    #[test]
    fn halving_rounds_cumulative_counts() {
        let s = sched(&[], &[1]);
        assert_eq!(cumulatives(&s.halve(true), 6), vec![1, 1, 2, 2, 3, 3]);
        assert_eq!(cumulatives(&s.halve(false), 6), vec![0, 1, 1, 2, 2, 3]);
        let s = sched(&[3], &[2, 3]);
        for k in 0..30 {
            assert_eq!(s.halve(true).cumulative(k), s.cumulative(k).div_ceil(2));
            assert_eq!(s.halve(false).cumulative(k), s.cumulative(k) / 2);
        }
    }

    #[test]
    fn interleaving_takes_the_earlier_boundary() {
        let pairs =
            [(sched(&[], &[1]), sched(&[0], &[1])), (sched(&[5], &[1]), sched(&[], &[3])), (sched(&[], &[4, 1]), sched(&[2], &[1]))];
        for (a, b) in pairs {
            let s = a.interleave(&b);
            for k in 0..60 {
                let want = (2 * a.cumulative(k)).min(2 * b.cumulative(k) + 1);
                assert_eq!(s.cumulative(k), want, "{a} {b} at {k}");
            }
        }
    }

    #[test]
    fn shortfall_is_exact() {
        let declared = ChunkSignature::fixed(2, 1).unwrap().schedule();
        let body = sched(&[1], &[1]);
        assert_eq!(body.first_shortfall(&declared), Some(1));
        assert_eq!(declared.first_shortfall(&body), None);
        let slow = sched(&[10], &[1]);
        let fast = sched(&[], &[2]);
        let k = slow.first_shortfall(&fast).unwrap();
        assert!(slow.cumulative(k) < fast.cumulative(k));
        assert!((0..k).all(|j| slow.cumulative(j) >= fast.cumulative(j)));
    }

    #[test]
    fn signatures() {
        assert_eq!(ChunkSignature::Bool(false).schedule(), sched(&[0], &[1]));
        assert_eq!(ChunkSignature::fixed(0, 1), Err(ScheduleError::ZeroModulus(0)));
        assert_eq!(ChunkSignature::pattern(vec![1, 0], vec![1]), Err(ScheduleError::EmptyChunk));
        let b = ChunkSignature::Bool(true);
        assert_eq!(b.describe(&ChunkSignature::Bool(false).schedule()), "bool(false)");
        assert_eq!(b.describe(&sched(&[2], &[1])), "pattern[2;1]");
        assert_eq!(ChunkSignature::fixed(2, 1).unwrap().describe(&sched(&[1], &[1])), "(1,1)");
        assert!(sched(&[1], &[1, 1]).same_as(&sched(&[], &[1])));
    }
}

//! Combinatorics of the tubular condition `(m_B - 1) r_inf + m_Y r_fin < n`:
//! the numbers `m_B`, `m_Y` from incidence flags, feasible place
//! signatures, and the pigeonhole step assigning divisors to places.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIVISORS: usize = 20;

/// Flags on subsets `I` of `{1..n}`, stored densely by bitmask
/// (bit `i - 1` for divisor `i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceData {
    n: usize,
    finite: Vec<bool>,
    contained: Vec<bool>,
}

/// JSON input: minimal true subsets, closed upward on load unless
/// `closure` is false, in which case the lists must already be complete.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct IncidenceInput {
    pub n: usize,
    #[serde(default)]
    pub finite: Vec<Vec<usize>>,
    #[serde(default)]
    pub contained: Vec<Vec<usize>>,
    #[serde(default = "default_closure")]
    pub closure: bool,
}

fn default_closure() -> bool {
    true
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIVISORS {
        return Err(Error::Incidence(format!(
            "n = {n} outside 1..={MAX_DIVISORS}"
        )));
    }
    Ok(())
}

fn mask_of(n: usize, set: &[usize]) -> Result<usize> {
    let mut m = 0usize;
    for &i in set {
        if i == 0 || i > n {
            return Err(Error::Incidence(format!("index {i} outside 1..={n}")));
        }
        m |= 1 << (i - 1);
    }
    Ok(m)
}

/// Upward closure: superset-sum over the subset lattice.
fn close_upward(n: usize, flags: &mut [bool]) {
    for bit in 0..n {
        for m in 0..flags.len() {
            if m & (1 << bit) != 0 && flags[m ^ (1 << bit)] {
                flags[m] = true;
            }
        }
    }
}

fn is_monotone(n: usize, flags: &[bool]) -> bool {
    (0..flags.len()).all(|m| !flags[m] || (0..n).all(|b| flags[m | (1 << b)]))
}

impl IncidenceData {
    /// From minimal true subsets (1-based indices), closing upward.
    pub fn from_minimal_sets(
        n: usize,
        finite: &[Vec<usize>],
        contained: &[Vec<usize>],
    ) -> Result<Self> {
        check_n(n)?;
        let mut f = vec![false; 1 << n];
        let mut c = vec![false; 1 << n];
        for s in finite {
            f[mask_of(n, s)?] = true;
        }
        for s in contained {
            c[mask_of(n, s)?] = true;
        }
        close_upward(n, &mut f);
        close_upward(n, &mut c);
        Ok(IncidenceData {
            n,
            finite: f,
            contained: c,
        })
    }

    /// From complete flag tables indexed by bitmask; rejects non-monotone data.
    pub fn from_flags(n: usize, finite: Vec<bool>, contained: Vec<bool>) -> Result<Self> {
        check_n(n)?;
        if finite.len() != 1 << n || contained.len() != 1 << n {
            return Err(Error::Incidence(format!(
                "flag tables must have 2^{n} entries"
            )));
        }
        if !is_monotone(n, &finite) {
            return Err(Error::Incidence("finiteness flags are not monotone".into()));
        }
        if !is_monotone(n, &contained) {
            return Err(Error::Incidence(
                "containment flags are not monotone".into(),
            ));
        }
        Ok(IncidenceData {
            n,
            finite,
            contained,
        })
    }

    pub fn from_input(input: &IncidenceInput) -> Result<Self> {
        if input.closure {
            return Self::from_minimal_sets(input.n, &input.finite, &input.contained);
        }
        check_n(input.n)?;
        let mut f = vec![false; 1 << input.n];
        let mut c = vec![false; 1 << input.n];
        for s in &input.finite {
            f[mask_of(input.n, s)?] = true;
        }
        for s in &input.contained {
            c[mask_of(input.n, s)?] = true;
        }
        Self::from_flags(input.n, f, c)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let input: IncidenceInput =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("incidence file: {e}")))?;
        Self::from_input(&input)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_finite(&self, mask: usize) -> bool {
        self.finite[mask]
    }

    pub fn is_contained(&self, mask: usize) -> bool {
        self.contained[mask]
    }

    /// Sets a flag and re-closes upward.
    pub fn with_flag(&self, mask: usize, finite: bool) -> Self {
        let mut out = self.clone();
        let flags = if finite {
            &mut out.finite
        } else {
            &mut out.contained
        };
        flags[mask] = true;
        close_upward(out.n, flags);
        out
    }

    fn all_of_size(&self, flags: &[bool], k: usize) -> bool {
        (0..flags.len())
            .filter(|m| m.count_ones() as usize == k)
            .all(|m| flags[m])
    }

    /// Smallest `m >= 1` with `T_I` finite for every `|I| = m`; `None` if
    /// none exists.
    pub fn m_baker(&self) -> Option<usize> {
        (1..=self.n).find(|&m| self.all_of_size(&self.finite, m))
    }

    /// Smallest `m >= 0` such that every intersection of more than `m`
    /// supports lies in Y.
    pub fn m_tubular(&self) -> Result<usize> {
        let full = (1 << self.n) - 1;
        if !self.contained[full] {
            return Err(Error::Incidence(
                "the intersection of all supports is not contained in Y".into(),
            ));
        }
        Ok((0..=self.n)
            .find(|&m| (m + 1..=self.n).all(|k| self.all_of_size(&self.contained, k)))
            .expect("m = n always qualifies"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PlaceSignature {
    pub r_inf: usize,
    pub r_fin: usize,
}

/// `(m_B - 1) r_inf + m_Y r_fin < n`.
pub fn check_condition(m_b: usize, m_y: usize, sig: PlaceSignature, n: usize) -> bool {
    debug_assert!(m_b >= 1);
    (m_b - 1) * sig.r_inf + m_y * sig.r_fin < n
}

/// All signatures with `1 <= r_inf <= caps.0`, `0 <= r_fin <= caps.1`
/// satisfying the condition, in lexicographic order.
pub fn feasible_signatures(
    m_b: usize,
    m_y: usize,
    n: usize,
    caps: (usize, usize),
) -> Vec<PlaceSignature> {
    let mut out = Vec::new();
    for r_inf in 1..=caps.0 {
        for r_fin in 0..=caps.1 {
            let sig = PlaceSignature { r_inf, r_fin };
            if check_condition(m_b, m_y, sig, n) {
                out.push(sig);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PigeonholeOutcome {
    /// More than `m_Y` divisors at one finite place.
    BoundedByIntersection { place: usize, indices: Vec<usize> },
    /// `m_B` divisors extracted from one archimedean place.
    Archimedean { place: usize, indices: Vec<usize> },
    /// Neither: the fibers are too small, contradicting the condition.
    ConditionViolated,
}

/// Classifies an assignment `divisor -> place` (0-based).
pub fn classify_assignment(
    assign: &[usize],
    is_arch: &[bool],
    m_b: usize,
    m_y: usize,
) -> PigeonholeOutcome {
    let mut fibers = vec![Vec::new(); is_arch.len()];
    for (i, &w) in assign.iter().enumerate() {
        fibers[w].push(i);
    }
    for (w, fiber) in fibers.iter().enumerate() {
        if !is_arch[w] && fiber.len() > m_y {
            return PigeonholeOutcome::BoundedByIntersection {
                place: w,
                indices: fiber.clone(),
            };
        }
    }
    for (w, fiber) in fibers.iter().enumerate() {
        if is_arch[w] && fiber.len() >= m_b {
            return PigeonholeOutcome::Archimedean {
                place: w,
                indices: fiber[..m_b].to_vec(),
            };
        }
    }
    PigeonholeOutcome::ConditionViolated
}

/// Sends each divisor to a place maximizing its table entry (lowest index
/// on ties) and classifies the result. Every row must reach `threshold`.
pub fn pigeonhole_assignment(
    table: &[Vec<f64>],
    is_arch: &[bool],
    m_b: usize,
    m_y: usize,
    threshold: f64,
) -> Result<PigeonholeOutcome> {
    if m_b == 0 {
        return Err(Error::Incidence("m_B must be at least 1".into()));
    }
    let mut assign = Vec::with_capacity(table.len());
    for (i, row) in table.iter().enumerate() {
        if row.len() != is_arch.len() {
            return Err(Error::Incidence(format!(
                "row {i} has {} entries but S has {} places",
                row.len(),
                is_arch.len()
            )));
        }
        let (w, v) = row
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (w, &v)| {
                if v > best.1 {
                    (w, v)
                } else {
                    best
                }
            });
        if row.is_empty() || v < threshold {
            return Err(Error::Incidence(format!(
                "row {i} never reaches the threshold"
            )));
        }
        assign.push(w);
    }
    Ok(classify_assignment(&assign, is_arch, m_b, m_y))
}

/// Every assignment of `n` divisors to `s` places, `r_inf` of them
/// archimedean; returns the number of assignments ending in
/// [`PigeonholeOutcome::ConditionViolated`].
pub fn count_violations(n: usize, r_inf: usize, r_fin: usize, m_b: usize, m_y: usize) -> usize {
    let s = r_inf + r_fin;
    let is_arch: Vec<bool> = (0..s).map(|w| w < r_inf).collect();
    let total = s.pow(n as u32);
    let mut assign = vec![0usize; n];
    let mut bad = 0;
    for mut code in 0..total {
        for a in assign.iter_mut() {
            *a = code % s;
            code /= s;
        }
        if classify_assignment(&assign, &is_arch, m_b, m_y) == PigeonholeOutcome::ConditionViolated
        {
            bad += 1;
        }
    }
    bad
}

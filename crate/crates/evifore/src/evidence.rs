//! Mass functions over small frames, Dempster's combination rule, and the
//! incremental fusion state that keeps streaming combination at constant cost.

use serde::{Deserialize, Serialize};

use crate::domain::validate_value;
use crate::error::{Error, Result};

/// Normalization guard: below this magnitude, 1 - k is treated as zero and
/// the combination is reported as total conflict.
pub const CONFLICT_EPSILON: f64 = 1e-12;

/// Largest frame the exact power-set combiner accepts.
pub const MAX_FRAME: usize = 10;

/// Tolerance on the unit-sum check of a general mass function.
const MASS_SUM_TOLERANCE: f64 = 1e-9;

/// A pairwise growth mass over the binary frame {A, not-A}.
///
/// `m_a` is the ratio of the earlier observation to the later one; the
/// complement mass is `1 - m_a`. Unlike a classical mass function the values
/// are not confined to [0, 1]: a falling pair yields `m_a > 1` (excess
/// support) and a negative complement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryBpa {
    m_a: f64,
    m_abar: f64,
}

impl BinaryBpa {
    /// Builds the mass directly from the support value. The complement is
    /// always `1 - m_a`, so the pair sums to one by construction.
    pub fn new(m_a: f64) -> Result<Self> {
        if !m_a.is_finite() {
            return Err(Error::InvalidMass {
                reason: format!("support mass {m_a} is not finite"),
            });
        }
        Ok(Self { m_a, m_abar: 1.0 - m_a })
    }

    /// The mass contributed by a consecutive pair of observations:
    /// `m(A) = y_prev / y_next`.
    pub fn from_pair(y_prev: f64, y_next: f64) -> Result<Self> {
        validate_value(y_prev, None)?;
        validate_value(y_next, None)?;
        Self::new(y_prev / y_next)
    }

    pub fn m_a(&self) -> f64 {
        self.m_a
    }

    pub fn m_abar(&self) -> f64 {
        self.m_abar
    }
}

/// Running combination of pairwise masses under Dempster's rule on the
/// binary frame.
///
/// On this frame every mixed intersection is empty, so the combined support
/// collapses to two running products: `p_a` over support masses and `p_abar`
/// over complement masses, with `1 - k = p_a + p_abar`. Each new pair
/// multiplies into both products, which is what makes streaming updates O(1).
///
/// Alongside the raw products the state carries log-magnitude accumulators.
/// The raw complement product underflows to zero after a few thousand points
/// (each factor is typically well below one); the log form keeps the
/// support/complement ratio — and therefore the combined belief — accurate
/// for arbitrarily long series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionState {
    p_a: f64,
    p_abar: f64,
    ln_a: f64,
    sign_a: i8,
    ln_abar: f64,
    sign_abar: i8,
    pairs: u64,
}

impl Default for FusionState {
    fn default() -> Self {
        Self::new()
    }
}

impl FusionState {
    /// The empty state: multiplicative identities, zero pairs.
    pub fn new() -> Self {
        Self {
            p_a: 1.0,
            p_abar: 1.0,
            ln_a: 0.0,
            sign_a: 1,
            ln_abar: 0.0,
            sign_abar: 1,
            pairs: 0,
        }
    }

    /// Folds one more pairwise mass into the state. Constant work.
    #[must_use]
    pub fn fuse(&self, bpa: &BinaryBpa) -> Self {
        let mut next = *self;
        next.p_a = clamped_mul(next.p_a, bpa.m_a);
        next.p_abar = clamped_mul(next.p_abar, bpa.m_abar);
        accumulate_log(&mut next.ln_a, &mut next.sign_a, bpa.m_a);
        accumulate_log(&mut next.ln_abar, &mut next.sign_abar, bpa.m_abar);
        next.pairs += 1;
        next
    }

    /// Running product of support masses. Telescopes to `y_1 / y_n` for a
    /// series, so it stays well-scaled.
    pub fn product_a(&self) -> f64 {
        self.p_a
    }

    /// Running product of complement masses. Floors to exactly zero once it
    /// underflows; reconstructed from the log accumulators if the raw
    /// product saturated.
    pub fn product_abar(&self) -> f64 {
        if self.raw_trusted() {
            self.p_abar
        } else {
            f64::from(self.sign_abar) * self.ln_abar.exp()
        }
    }

    /// Count of masses fused so far.
    pub fn pairs(&self) -> u64 {
        self.pairs
    }

    /// The normalization constant of the combination.
    pub fn one_minus_k(&self) -> f64 {
        self.p_a + self.product_abar()
    }

    /// The combined support belief: `p_a / (p_a + p_abar)`.
    ///
    /// Computed from the raw products while they are representable and from
    /// the log accumulators once they are not, so long histories do not lose
    /// the answer to underflow.
    pub fn gbpa(&self) -> Result<f64> {
        if self.pairs == 0 {
            return Err(Error::SeriesTooShort { needed: 2, got: 1 });
        }
        let one_minus_k = self.one_minus_k();
        if one_minus_k.abs() <= CONFLICT_EPSILON {
            return Err(Error::TotalConflict { one_minus_k });
        }
        if self.raw_trusted() {
            return Ok(self.p_a / one_minus_k);
        }
        if self.sign_a == 0 {
            return Ok(0.0);
        }
        let ratio = match self.sign_abar {
            0 => 0.0,
            s => f64::from(s * self.sign_a) * (self.ln_abar - self.ln_a).exp(),
        };
        Ok(1.0 / (1.0 + ratio))
    }

    /// Whether the raw products still carry the true magnitudes.
    fn raw_trusted(&self) -> bool {
        let a_ok = (self.p_a != 0.0 || self.sign_a == 0) && self.p_a.abs() < f64::MAX;
        let abar_ok =
            (self.p_abar != 0.0 || self.sign_abar == 0) && self.p_abar.abs() < f64::MAX;
        a_ok && abar_ok
    }
}

/// Raw product step: canonicalizes -0, floors underflow at exactly zero, and
/// saturates overflow at the largest finite magnitude so the state never
/// carries infinities (which JSON cannot represent) or NaNs.
fn clamped_mul(p: f64, m: f64) -> f64 {
    let r = p * m;
    if r.is_nan() || r == 0.0 {
        0.0
    } else if r.is_infinite() {
        f64::MAX.copysign(r)
    } else {
        r
    }
}

fn accumulate_log(ln_abs: &mut f64, sign: &mut i8, factor: f64) {
    if *sign == 0 {
        return; // a zero factor already made the product exactly zero
    }
    if factor == 0.0 {
        *sign = 0;
        return;
    }
    if factor < 0.0 {
        *sign = -*sign;
    }
    *ln_abs += factor.abs().ln();
}

/// A mass function over an explicit frame of discernment.
///
/// Masses are stored densely over the power set, indexed by subset bitmask
/// (bit `i` set means the `i`-th frame label is in the subset). The frame is
/// capped at [`MAX_FRAME`] labels so enumeration stays exact.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralBpa {
    frame: Vec<String>,
    masses: Vec<f64>,
}

impl GeneralBpa {
    /// Builds a mass function from label-set/mass assignments.
    ///
    /// Rejects assignments to the empty set, masses that do not sum to one,
    /// and labels outside the frame. Masses outside [0, 1] are allowed, in
    /// keeping with the relaxed pairwise semantics.
    pub fn from_masses<I, S>(frame: Vec<String>, assignments: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<S>, f64)>,
        S: AsRef<str>,
    {
        if frame.len() > MAX_FRAME {
            return Err(Error::FrameTooLarge { size: frame.len(), max: MAX_FRAME });
        }
        if frame.is_empty() {
            return Err(Error::InvalidMass { reason: "empty frame".into() });
        }
        let mut masses = vec![0.0; 1 << frame.len()];
        for (labels, mass) in assignments {
            if !mass.is_finite() {
                return Err(Error::InvalidMass {
                    reason: format!("mass {mass} is not finite"),
                });
            }
            let mask = subset_mask(&frame, &labels)?;
            if mask == 0 {
                return Err(Error::InvalidMass {
                    reason: "mass assigned to the empty set".into(),
                });
            }
            masses[mask] += mass;
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_SUM_TOLERANCE {
            return Err(Error::InvalidMass {
                reason: format!("masses sum to {total}, expected 1"),
            });
        }
        Ok(Self { frame, masses })
    }

    /// The binary-frame view of a pairwise mass, with labels `A` / `Ā`.
    pub fn from_binary(bpa: &BinaryBpa) -> Self {
        let frame = vec!["A".to_string(), "Ā".to_string()];
        // Masks: {A} = 0b01, {Ā} = 0b10; empty and full sets carry none.
        Self { frame, masses: vec![0.0, bpa.m_a(), bpa.m_abar(), 0.0] }
    }

    pub fn frame(&self) -> &[String] {
        &self.frame
    }

    /// Mass on the subset described by `labels`.
    pub fn mass<S: AsRef<str>>(&self, labels: &[S]) -> Result<f64> {
        Ok(self.masses[subset_mask(&self.frame, labels)?])
    }

    /// Non-zero (subset-mask, mass) entries.
    pub fn focal_masses(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != 0.0)
            .map(|(i, &m)| (i, m))
    }

    /// Labels of the subset with the given bitmask.
    pub fn subset_labels(&self, mask: usize) -> Vec<&str> {
        self.frame
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, l)| l.as_str())
            .collect()
    }
}

fn subset_mask<S: AsRef<str>>(frame: &[String], labels: &[S]) -> Result<usize> {
    let mut mask = 0usize;
    for label in labels {
        let idx = frame
            .iter()
            .position(|f| f == label.as_ref())
            .ok_or_else(|| Error::InvalidMass {
                reason: format!("label {:?} not in frame", label.as_ref()),
            })?;
        mask |= 1 << idx;
    }
    Ok(mask)
}

/// Combines mass functions over a common frame under Dempster's rule.
///
/// The joint mass of every intersection is accumulated exactly over the
/// power set, then normalized once by `1 - k`, the total mass landing on
/// non-empty intersections. The mass of the empty set is forced to zero.
pub fn combine_dempster(bpas: &[GeneralBpa]) -> Result<GeneralBpa> {
    let first = bpas.first().ok_or(Error::EmptyInput)?;
    if first.frame.len() > MAX_FRAME {
        return Err(Error::FrameTooLarge { size: first.frame.len(), max: MAX_FRAME });
    }
    if bpas.iter().any(|b| b.frame != first.frame) {
        return Err(Error::MismatchedFrames);
    }

    let size = 1usize << first.frame.len();
    // Start from the vacuous mass (everything on the full frame), the
    // identity of conjunctive combination.
    let mut acc = vec![0.0; size];
    acc[size - 1] = 1.0;
    for bpa in bpas {
        let mut next = vec![0.0; size];
        for (i, &ma) in acc.iter().enumerate() {
            if ma == 0.0 {
                continue;
            }
            for (j, mb) in bpa.focal_masses() {
                next[i & j] += ma * mb;
            }
        }
        acc = next;
    }

    let one_minus_k: f64 = acc[1..].iter().sum();
    if one_minus_k.abs() <= CONFLICT_EPSILON {
        return Err(Error::TotalConflict { one_minus_k });
    }
    let mut masses: Vec<f64> = acc.iter().map(|&m| m / one_minus_k).collect();
    masses[0] = 0.0;
    Ok(GeneralBpa { frame: first.frame.clone(), masses })
}

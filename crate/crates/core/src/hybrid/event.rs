//! Guard-crossing localization by bisection on a signed margin.
//!
//! Guard margins are negative while the guard is not triggered and
//! non-negative once it is.

use crate::{Error, Result, State};

/// Width of the final bracket around a localized crossing, in seconds.
pub const EVENT_TOLERANCE: f64 = 1e-9;

const MAX_BISECTIONS: usize = 200;

/// Locates a sign change of `guard(t, interpolant(t))` on `[t_lo, t_hi]`.
///
/// Returns `None` when the margin has the same sign at both ends. Otherwise
/// the returned time lies within [`EVENT_TOLERANCE`] of the crossing and is
/// on the same side of it as `t_hi` (for a rising margin: the guard holds).
pub fn locate_event<G, I>(guard: G, interpolant: I, t_lo: f64, t_hi: f64) -> Result<Option<f64>>
where
    G: Fn(f64, &State) -> f64,
    I: Fn(f64) -> State,
{
    locate_crossing(|t| guard(t, &interpolant(t)), t_lo, t_hi)
}

/// [`locate_event`] for a margin already expressed as a function of time.
pub fn locate_crossing<M>(margin: M, t_lo: f64, t_hi: f64) -> Result<Option<f64>>
where
    M: Fn(f64) -> f64,
{
    if !(t_hi > t_lo) {
        return Err(Error::InvalidArgument(format!(
            "event bracket must satisfy t_lo < t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    let eval = |t: f64| {
        let m = margin(t);
        if m.is_nan() {
            Err(Error::numerical(t, "guard margin is NaN"))
        } else {
            Ok(m)
        }
    };

    let (mut lo, mut hi) = (t_lo, t_hi);
    let mut m_lo = eval(lo)?;
    let mut m_hi = eval(hi)?;
    let hi_side = m_hi < 0.0;
    if (m_lo < 0.0) == hi_side {
        return Ok(None);
    }

    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= EVENT_TOLERANCE {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let m_mid = eval(mid)?;
        if (m_mid < 0.0) == hi_side {
            hi = mid;
            m_hi = m_mid;
        } else {
            lo = mid;
            m_lo = m_mid;
        }
    }

    // One secant step inside the final bracket. Exact for margins that are
    // affine in time, which makes time-triggered switching land on its instant.
    let span = m_hi - m_lo;
    if span.is_finite() && span != 0.0 {
        let ts = (lo - m_lo * (hi - lo) / span).clamp(lo, hi);
        if (eval(ts)? < 0.0) == hi_side {
            return Ok(Some(ts));
        }
    }
    Ok(Some(hi))
}

use rand::Rng;

use super::buffer::{ReplayBuffer, Transition};
use super::policy::state_action;
use crate::error::Result;
use crate::rff::gaussian_kernel;

/// Reference transition followed by the buffered transitions of the last `n_w` steps
/// whose state-action is kernel-similar (`κ > c`) to the reference's.
///
/// With the reference at time `τ_ref = n - 1`, candidates are `τ ∈ [τ_ref - n_w, τ_ref - 1]`.
/// Similarity uses the exact Gaussian kernel.
pub fn local_sampling(
    buffer: &ReplayBuffer,
    reference: &Transition,
    n_w: usize,
    c: f64,
    bandwidth: f64,
) -> Result<Vec<Transition>> {
    let z_ref = state_action(&reference.state, reference.action);
    let hi = reference.time_index.saturating_sub(1);
    let lo = reference.time_index.saturating_sub(n_w as u64);
    let mut out = vec![reference.clone()];
    if n_w == 0 || reference.time_index == 0 {
        return Ok(out);
    }
    let mut picked = Vec::new();
    for t in buffer.iter().rev() {
        if t.time_index < lo {
            break;
        }
        if t.time_index > hi {
            continue;
        }
        let z = state_action(&t.state, t.action);
        if gaussian_kernel(&z_ref, &z, bandwidth)? > c {
            picked.push(t.clone());
        }
    }
    out.extend(picked.into_iter().rev());
    Ok(out)
}

/// One transition with `time_index ≤ n - horizon`, drawn uniformly. When nothing is that
/// old the oldest entry is used; `None` only for an empty buffer.
pub fn remote_past_sample<R: Rng + ?Sized>(
    buffer: &ReplayBuffer,
    n: u64,
    horizon: u64,
    rng: &mut R,
) -> Option<Transition> {
    let oldest = buffer.oldest()?;
    let cutoff = n.checked_sub(horizon);
    // time indices increase along the buffer, so eligible entries form a prefix
    let eligible = match cutoff {
        Some(c) => buffer.iter().take_while(|t| t.time_index <= c).count(),
        None => 0,
    };
    if eligible == 0 {
        return Some(oldest.clone());
    }
    buffer.get(rng.random_range(0..eligible)).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rl::state::StateVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tr(t: u64, s1: f64, action: f64) -> Transition {
        let s = StateVector {
            s1,
            s2: 0.0,
            s3: 0.0,
            s4: 0.0,
        };
        Transition {
            state: s,
            action,
            next_state: s,
            one_step_loss: 0.0,
            time_index: t,
        }
    }

    #[test]
    fn identical_tuple_is_included_distant_is_not() {
        let mut b = ReplayBuffer::new(100);
        b.push(tr(18, 0.0, 1.5));
        b.push(tr(19, 5.0, 1.5));
        let r = tr(20, 0.0, 1.5);
        let got = local_sampling(&b, &r, 10, 0.95, 1.0).unwrap();
        let times: Vec<u64> = got.iter().map(|t| t.time_index).collect();
        assert_eq!(times, vec![20, 18]);
    }

    #[test]
    fn window_filter_matches_direct_oracle() {
        // reference at τ = 30 ⇒ window [20, 29]; entries 15..=29 in the buffer
        let mut b = ReplayBuffer::new(100);
        let close = [21u64, 24, 29];
        for t in 15..=29u64 {
            let s1 = if close.contains(&t) || t < 20 { 0.1 } else { 3.0 };
            b.push(tr(t, s1, 1.25));
        }
        let r = tr(30, 0.0, 1.25);
        let got = local_sampling(&b, &r, 10, 0.95, 1.0).unwrap();
        assert_eq!(got.len(), 4);
        let expected: Vec<u64> = b
            .iter()
            .filter(|t| (20..=29).contains(&t.time_index))
            .filter(|t| {
                let d2 = (t.state.s1 - 0.0f64).powi(2);
                (-d2 / 2.0).exp() > 0.95
            })
            .map(|t| t.time_index)
            .collect();
        let times: Vec<u64> = got[1..].iter().map(|t| t.time_index).collect();
        assert_eq!(times, expected);
        assert!(got[1..].iter().all(|t| t.time_index >= 20 && t.time_index <= 29));
    }

    #[test]
    fn remote_past_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut b = ReplayBuffer::new(2000);
        assert!(remote_past_sample(&b, 1, 500, &mut rng).is_none());
        b.push(tr(1, 0.0, 1.0));
        assert_eq!(remote_past_sample(&b, 2, 500, &mut rng).unwrap().time_index, 1);

        let mut b = ReplayBuffer::new(2000);
        for t in 1..5000u64 {
            b.push(tr(t, 0.0, 1.0));
        }
        for _ in 0..500 {
            let t = remote_past_sample(&b, 5000, 500, &mut rng).unwrap();
            assert!(t.time_index <= 4500);
            assert!(t.time_index >= 3000);
        }
    }
}

use crate::error::{Error, Result};
use crate::model::{Trajectory, DOMAINS};

/// First time capacity in `domain` drops below `c_bar`, linearly
/// interpolated between the bracketing samples. `None` if it never does.
pub fn time_to_threshold(traj: &Trajectory, c_bar: f64, domain: usize) -> Result<Option<f64>> {
    if domain >= DOMAINS {
        return Err(Error::DomainIndex(domain));
    }
    let first = traj
        .samples
        .first()
        .ok_or_else(|| Error::Config("empty trajectory".into()))?;
    let cap = |k: usize| traj.samples[k].state.domains[domain].c;
    if cap(0) < c_bar {
        return Ok(Some(first.t));
    }
    for k in 1..traj.samples.len() {
        let (c0, c1) = (cap(k - 1), cap(k));
        if c1 < c_bar {
            let (t0, t1) = (traj.samples[k - 1].t, traj.samples[k].t);
            return Ok(Some(t0 + (c0 - c_bar) / (c0 - c1) * (t1 - t0)));
        }
    }
    Ok(None)
}

/// Fills `traj.crossing_year` for every domain.
pub fn fill_crossings(traj: &mut Trajectory, c_bar: f64) -> Result<()> {
    for i in 0..DOMAINS {
        traj.crossing_year[i] = time_to_threshold(traj, c_bar, i)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelParams, Sample, SystemState};

    fn linear(slope: f64, n: usize, dt: f64) -> Trajectory {
        let params = ModelParams {
            dt,
            ..ModelParams::zero_dynamics(1.0)
        };
        let base = SystemState::uniform(1.0, &params).unwrap();
        let samples = (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                let mut st = base.clone();
                st.t = t;
                for d in &mut st.domains {
                    d.c = 1.0 - slope * t;
                }
                Sample {
                    t,
                    state: st,
                    divergence: [0.0; 3],
                }
            })
            .collect();
        Trajectory {
            samples,
            params_used: params,
            crossing_year: [None; 3],
        }
    }

    #[test]
    fn closed_form_linear_decay() {
        // c(t) = 1 - 0.05 t crosses 0.5 at t = 10
        let tr = linear(0.05, 80, 0.25);
        let t = time_to_threshold(&tr, 0.5, 0).unwrap().unwrap();
        assert!((t - 10.0).abs() < 1e-12);
        // off-grid crossing is interpolated: 0.37 is reached at 12.6
        let t = time_to_threshold(&tr, 0.37, 1).unwrap().unwrap();
        assert!((t - 12.6).abs() < 1e-9);
    }

    #[test]
    fn crossing_at_sample_returns_that_time() {
        let tr = linear(0.05, 30, 1.0);
        assert_eq!(time_to_threshold(&tr, 0.5, 2).unwrap(), Some(10.0));
    }

    #[test]
    fn flat_above_threshold_never_crosses() {
        let tr = linear(0.0, 10, 1.0);
        assert_eq!(time_to_threshold(&tr, 0.5, 0).unwrap(), None);
        assert!(matches!(time_to_threshold(&tr, 0.5, 3), Err(Error::DomainIndex(3))));
    }

    #[test]
    fn starting_below_threshold() {
        let tr = linear(0.0, 10, 1.0);
        assert_eq!(time_to_threshold(&tr, 2.0, 0).unwrap(), Some(0.0));
    }
}

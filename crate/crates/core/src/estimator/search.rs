//! Derivative-free minimization: exhaustive grid plus Nelder–Mead polish.

/// Outcome of a Nelder–Mead run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polished {
    pub point: [f64; 3],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Standard Nelder–Mead (reflection 1, expansion 2, contraction ½, shrink ½)
/// started from `start` with per-axis initial `steps`.
///
/// Stops when the spread of the simplex values drops below `tolerance` or
/// after `max_iterations`.
pub fn nelder_mead<F>(f: F, start: [f64; 3], steps: [f64; 3], tolerance: f64, max_iterations: usize) -> Polished
where
    F: Fn(&[f64; 3]) -> f64,
{
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((start, f(&start)));
    for axis in 0..3 {
        let mut p = start;
        p[axis] += steps[axis];
        simplex.push((p, f(&p)));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[3].1 - simplex[0].1 < tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = [0.0; 3];
        for (p, _) in &simplex[..3] {
            for i in 0..3 {
                centroid[i] += p[i] / 3.0;
            }
        }
        let worst = simplex[3];
        let along = |t: f64| -> [f64; 3] {
            let mut q = [0.0; 3];
            for i in 0..3 {
                q[i] = centroid[i] + t * (worst.0[i] - centroid[i]);
            }
            q
        };

        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            simplex[3] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[2].1 {
            simplex[3] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst.1 {
            let c = along(-0.5);
            (c, f(&c))
        } else {
            let c = along(0.5);
            (c, f(&c))
        };
        if fc < worst.1.min(fr) {
            simplex[3] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0;
        for vertex in simplex.iter_mut().skip(1) {
            let mut q = [0.0; 3];
            for i in 0..3 {
                q[i] = best[i] + 0.5 * (vertex.0[i] - best[i]);
            }
            *vertex = (q, f(&q));
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Polished {
        point: simplex[0].0,
        value: simplex[0].1,
        iterations,
        converged,
    }
}

/// Grid points `first, first + step, ...` strictly below `end`.
pub fn axis(first: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - first) / step - 1e-9).ceil().max(1.0) as usize;
    (0..n).map(|i| first + i as f64 * step).filter(|v| *v < end).collect()
}

//! Two-parameter Nelder–Mead refinement used by the closest-state search.

/// Maximizes `f` over a box, starting from `start` with the given simplex
/// step. Returns the best point and value. Points are clamped to the box,
/// which is adequate here: optima sit inside the box by construction.
pub(crate) fn nelder_mead_max_2d<F>(
    f: F,
    start: [f64; 2],
    step: [f64; 2],
    lower: [f64; 2],
    upper: [f64; 2],
    param_tol: f64,
    max_iter: usize,
) -> ([f64; 2], f64)
where
    F: Fn(&[f64; 2]) -> f64,
{
    let clamp = |p: [f64; 2]| {
        [
            p[0].clamp(lower[0], upper[0]),
            p[1].clamp(lower[1], upper[1]),
        ]
    };
    let mut simplex: Vec<([f64; 2], f64)> = vec![
        clamp(start),
        clamp([start[0] + step[0], start[1]]),
        clamp([start[0], start[1] + step[1]]),
    ]
    .into_iter()
    .map(|p| (p, f(&p)))
    .collect();

    for _ in 0..max_iter {
        // descending by value: best first
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let spread = (simplex[0].0[0] - simplex[2].0[0])
            .abs()
            .max((simplex[0].0[1] - simplex[2].0[1]).abs());
        if spread < param_tol {
            break;
        }
        let centroid = [
            (simplex[0].0[0] + simplex[1].0[0]) / 2.0,
            (simplex[0].0[1] + simplex[1].0[1]) / 2.0,
        ];
        let worst = simplex[2];
        let reflect = clamp([
            centroid[0] + (centroid[0] - worst.0[0]),
            centroid[1] + (centroid[1] - worst.0[1]),
        ]);
        let f_reflect = f(&reflect);
        if f_reflect > simplex[0].1 {
            let expand = clamp([
                centroid[0] + 2.0 * (centroid[0] - worst.0[0]),
                centroid[1] + 2.0 * (centroid[1] - worst.0[1]),
            ]);
            let f_expand = f(&expand);
            simplex[2] = if f_expand > f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
        } else if f_reflect > simplex[1].1 {
            simplex[2] = (reflect, f_reflect);
        } else {
            let contract = clamp([
                centroid[0] + 0.5 * (worst.0[0] - centroid[0]),
                centroid[1] + 0.5 * (worst.0[1] - centroid[1]),
            ]);
            let f_contract = f(&contract);
            if f_contract > worst.1 {
                simplex[2] = (contract, f_contract);
            } else {
                // shrink toward the best vertex
                for i in 1..3 {
                    let p = clamp([
                        simplex[0].0[0] + 0.5 * (simplex[i].0[0] - simplex[0].0[0]),
                        simplex[0].0[1] + 0.5 * (simplex[i].0[1] - simplex[0].0[1]),
                    ]);
                    simplex[i] = (p, f(&p));
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    simplex[0]
}

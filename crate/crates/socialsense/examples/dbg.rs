use socialsense::lp::*;
use socialsense::revealed_prefs::*;

fn main() {
    let data = synth::random_dataset(8, 2, 11);
    // Rebuild the Afriat LP by hand for inspection.
    let t_count = 8usize;
    let nvars = 2 * t_count;
    let dotf = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut constraints = Vec::new();
    for t in 0..t_count {
        let pt_xt = dotf(data.price(t), data.response(t));
        for tau in 0..t_count {
            if t == tau { continue; }
            let mut coeffs = vec![0.0; nvars];
            coeffs[tau] += 1.0;
            coeffs[t] -= 1.0;
            coeffs[t_count + t] = -(dotf(data.price(t), data.response(tau)) - pt_xt);
            constraints.push(Constraint { coeffs, relation: Relation::Le, rhs: 0.0 });
        }
    }
    let mut bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); t_count];
    bounds.extend(std::iter::repeat((1e-6, f64::INFINITY)).take(t_count));
    let lp = LinearProgram { maximize: vec![0.0; nvars], constraints, bounds };
    match solve(&lp).unwrap() {
        LpOutcome::Optimal { x, .. } => {
            println!("solve says OPTIMAL, check_solution = {}", check_solution(&lp, &x, 1e-7));
            let worst = lp.constraints.iter().map(|c| {
                let lhs: f64 = c.coeffs.iter().zip(&x).map(|(a, v)| a * v).sum();
                lhs - c.rhs
            }).fold(f64::NEG_INFINITY, f64::max);
            println!("worst constraint violation: {worst:.3e}");
            let minl = x[t_count..].iter().cloned().fold(f64::INFINITY, f64::min);
            println!("min lambda: {minl:.3e}");
        }
        LpOutcome::Infeasible { farkas } => {
            println!("solve says INFEASIBLE, cert valid = {}", check_infeasibility_certificate(&lp, &farkas, 1e-7));
        }
        LpOutcome::Unbounded { .. } => println!("unbounded?!"),
    }
}

use povm_compat::experiments::counterexample;
use povm_compat::feasibility::{solve, AffinePsdProblem, SolveConfig, FeasibilityOutcome};
use povm_compat::povm::Povm;

fn main() {
    let cx = counterexample();
    // the 4 binary observables: 3 margins of A plus B itself
    let mut obs: Vec<Povm> = cx.a().binary_margins().unwrap().into_iter().map(|m| m.into_povm()).collect();
    obs.push(cx.b().clone());
    let p = AffinePsdProblem::marginal_problem(&obs).unwrap();
    let t0 = std::time::Instant::now();
    let out = solve(&p, &SolveConfig::default()).unwrap();
    let dt = t0.elapsed();
    match &out {
        FeasibilityOutcome::Feasible { diagnostics, .. } => println!("COLLECTION(λ=1): FEASIBLE iters={} in {:?}", diagnostics.iterations, dt),
        FeasibilityOutcome::Infeasible { diagnostics, .. } => println!("COLLECTION(λ=1): INFEASIBLE?! iters={} in {:?}", diagnostics.iterations, dt),
        FeasibilityOutcome::Indeterminate { diagnostics } => println!("COLLECTION(λ=1): INDET iters={} disp={} in {:?}", diagnostics.iterations, diagnostics.displacement_norm, dt),
    }

    // JM infeasibility timing
    let pjm = AffinePsdProblem::marginal_problem(&[cx.a().clone(), cx.b().clone()]).unwrap();
    let t0 = std::time::Instant::now();
    let out = solve(&pjm, &SolveConfig::default()).unwrap();
    println!("JM(λ=1): {:?} iters={} in {:?}", match &out { FeasibilityOutcome::Feasible{..} => "FEAS", FeasibilityOutcome::Infeasible{..} => "INFEAS", _ => "INDET" }, out.diagnostics().iterations, t0.elapsed());

    // JM at a few λ values to bracket the threshold roughly
    for lam in [0.8, 0.9, 0.95, 0.99] {
        let a = cx.a().mix_with_trivial(lam).unwrap();
        let b = cx.b().mix_with_trivial(lam).unwrap();
        let p = AffinePsdProblem::marginal_problem(&[a, b]).unwrap();
        let t0 = std::time::Instant::now();
        let out = solve(&p, &SolveConfig::default()).unwrap();
        println!("JM(λ={lam}): {} iters={} in {:?}", match &out { FeasibilityOutcome::Feasible{..} => "FEAS", FeasibilityOutcome::Infeasible{..} => "INFEAS", _ => "INDET" }, out.diagnostics().iterations, t0.elapsed());
    }
}

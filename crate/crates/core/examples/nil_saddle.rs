fn main() -> Result<(), Box<dyn std::error::Error>> {
    use killing_graph::{builtin_model, solve_dirichlet, BoundarySpec, GridDomain, Preset, ScalarField, SolveConfig};

    let model = builtin_model(&Preset::Nil3 { tau: 0.5 })?;
    let spec = BoundarySpec::uniform(ScalarField::parse("0.5*x*y")?);
    let dom = GridDomain::rectangle((0.0, 1.0, 0.0, 1.0), 32, 32, &spec)?;
    let zero = ScalarField::parse("0")?;
    let report = solve_dirichlet(&model, &dom, &zero, &SolveConfig::default(), None)?;
    println!(
        "converged {} after {} iterations, residual {:e}",
        report.converged, report.iterations, report.residual
    );
    Ok(())
}

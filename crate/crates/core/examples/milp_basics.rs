//! The bundled MILP layer on its own: a small capital budgeting problem.

use gridshutoff::milp::{branch_and_bound, check_solution, BranchOptions, MilpProblem, Relation, Sense};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let projects = [
        ("hardening", 8.0, 5.0),
        ("sensors", 5.0, 3.0),
        ("reconductor", 11.0, 7.0),
        ("tree_trim", 3.0, 1.5),
    ];
    let mut p = MilpProblem::new(Sense::Maximize);
    let mut picks = Vec::new();
    for (name, value, _) in projects {
        let v = p.add_binary(name)?;
        p.set_objective(v, value)?;
        picks.push(v);
    }
    let cost: Vec<_> = picks.iter().zip(projects).map(|(v, (_, _, c))| (*v, c)).collect();
    p.add_constraint("capital", cost, Relation::Le, 10.0)?;

    let sol = branch_and_bound(&p, &BranchOptions::with_gap(0.0))?;
    let values = sol.assignment.as_deref().ok_or("no feasible plan")?;
    println!(
        "{:?}: value {:?} after {} nodes",
        sol.status, sol.objective_value, sol.node_count
    );
    for ((name, ..), v) in projects.iter().zip(&picks) {
        if values[v.index()] > 0.5 {
            println!("  fund {name}");
        }
    }
    let report = check_solution(&p, values)?;
    println!(
        "feasible: {} (worst violation {:.1e})",
        report.feasible, report.worst_violation
    );
    Ok(())
}

use std::sync::Arc;

use super::{delaunay_square, ExperimentConfig, HarnessError, MeshFamily, MethodKind, Problem, Schedule};

const NAMES: [&str; 12] = [
    "table1",
    "table2",
    "table3",
    "table4",
    "table5",
    "table6",
    "table7",
    "example2",
    "example3",
    "table1-extended",
    "table2-extended",
    "table3-extended",
];

pub fn preset_names() -> &'static [&'static str] {
    &NAMES
}

fn structured(method: MethodKind, pairs: &[(usize, usize)], indices: &[usize]) -> ExperimentConfig {
    ExperimentConfig {
        problem: Problem::SquareLaplace,
        method,
        mesh: MeshFamily::Structured,
        schedule: Schedule::TwoGrid(pairs.to_vec()),
        indices: indices.to_vec(),
        output: None,
    }
}

fn adaptive(problem: Problem, method: MethodKind, epsilon: f64, max_levels: usize, initial: usize) -> ExperimentConfig {
    ExperimentConfig {
        problem,
        method,
        mesh: MeshFamily::Structured,
        schedule: Schedule::Adaptive {
            theta: 0.4,
            epsilon,
            max_levels,
            initial,
        },
        indices: vec![1],
        output: None,
    }
}

/// Named experiment set-ups. Some names expand to several runs (one per
/// method).
pub fn preset(name: &str) -> Result<Vec<ExperimentConfig>, HarnessError> {
    const DESK: [(usize, usize); 3] = [(4, 16), (8, 64), (16, 256)];
    const EXTENDED: [(usize, usize); 4] = [(4, 16), (8, 64), (16, 256), (32, 1024)];
    // coarse level k of the Delaunay base mesh pairs with fine level 2k + 2
    const LEVELS: [(usize, usize); 3] = [(0, 2), (1, 4), (2, 6)];
    let all = [1, 2, 3];
    let delaunay = |method| ExperimentConfig {
        mesh: MeshFamily::Refined(Arc::new(delaunay_square())),
        schedule: Schedule::TwoGrid(LEVELS.to_vec()),
        ..structured(method, &[], &all)
    };
    Ok(match name {
        "table1" => vec![structured(MethodKind::A1, &DESK, &all)],
        "table2" => vec![structured(MethodKind::A2, &DESK, &all)],
        "table3" => vec![structured(MethodKind::TG, &DESK, &all)],
        "table1-extended" => vec![structured(MethodKind::A1, &EXTENDED, &all)],
        "table2-extended" => vec![structured(MethodKind::A2, &EXTENDED, &all)],
        "table3-extended" => vec![structured(MethodKind::TG, &EXTENDED, &all)],
        "table4" => [MethodKind::A1, MethodKind::A2, MethodKind::TG]
            .into_iter()
            .map(|m| structured(m, &[(2, 16), (4, 256)], &[1]))
            .collect(),
        "table5" => vec![delaunay(MethodKind::A1)],
        "table6" => vec![delaunay(MethodKind::A2)],
        "table7" => vec![delaunay(MethodKind::TG)],
        "example2" => [MethodKind::A3, MethodKind::A4]
            .into_iter()
            .map(|m| adaptive(Problem::LshapeLaplace, m, 1.5e-3, 25, 8))
            .collect(),
        "example3" => [MethodKind::A3, MethodKind::A4]
            .into_iter()
            .map(|m| adaptive(Problem::HarmonicOscillator, m, 5e-5, 25, 2))
            .collect(),
        _ => {
            return Err(HarnessError::Config(format!(
                "unknown preset `{name}` (one of {})",
                NAMES.join(", ")
            )))
        }
    })
}

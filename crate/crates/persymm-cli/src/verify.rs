//! The `verify` subcommand: runs named suites over the library checks and
//! prints a machine-readable report (one line per case, one per criterion).

use std::process::ExitCode;

use persymm::checks::{self, CriterionReport};
use persymm::errata;

use crate::SuiteArg;

pub fn run(suite: SuiteArg, bit_budget: u32, errata_path: Option<std::path::PathBuf>) -> ExitCode {
    let errata_list: Vec<errata::Erratum> = match errata_path {
        None => errata::all().to_vec(),
        Some(path) => match std::fs::read_to_string(&path).map_err(|e| e.to_string()).and_then(|s| errata::parse(&s)) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("cannot load errata from {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
    };
    let reports: Vec<CriterionReport> = match suite {
        SuiteArg::Golden => vec![
            checks::criterion_golden_tables(),
            checks::criterion_solution_counts(),
        ],
        SuiteArg::Oracle => vec![checks::criterion_oracle_equivalence(bit_budget)],
        SuiteArg::Identities => vec![
            checks::criterion_moments(bit_budget),
            checks::criterion_low_rank_universality(),
            checks::criterion_a_coefficients(),
            checks::criterion_solution_enumeration(),
            checks::criterion_invertible_fraction(),
            checks::criterion_reductions(bit_budget),
        ],
        SuiteArg::Recurrence => vec![checks::criterion_recurrence_crosscheck()],
        SuiteArg::Expsum => vec![checks::criterion_exponential_sums(bit_budget.max(24))],
        SuiteArg::Profiles => vec![checks::criterion_profile_vanishing()],
    };
    let mut all_pass = true;
    for report in &reports {
        for case in &report.cases {
            if case.pass {
                println!("ok\t{}", case.name);
            } else {
                all_pass = false;
                println!("FAIL\t{}\t{}", case.name, case.detail);
            }
        }
        println!("{}", report.summary_line());
    }
    let applied: Vec<&str> = errata_list.iter().map(|e| e.id.as_str()).collect();
    println!("# recorded errata in effect: {}", applied.join(", "));
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

//! The `table` subcommand: built-in reference tables with citations.

use std::process::ExitCode;

use persymm::enumeration::gamma_bruteforce_double;
use persymm::formulas::{gamma_mixed_from_doubles, gamma_s1, gamma_ssm};
use persymm::MixedShape;

const IDS: &[(&str, &str)] = &[
    ("thm10.9-s2k6", "the [2,2,2]x6 distribution"),
    ("thm10.9-s3k5", "the [3,3,3]x5 distribution"),
    ("thm12.9-s3", "the [3,4,4]xk family sampled at --k (default 12)"),
    ("thm12.11-s2m2", "the [2,4,4]xk family sampled at --k (default 10)"),
    ("thm12.11-s3m4k7", "the [3,7,7]x7 distribution"),
    ("thm12.11-s3m4k10", "the [3,7,7]x10 distribution"),
    ("lemma1.22-m1l3", "the [1,2,5]xk family sampled at --k (default 6)"),
    ("example-mixed-n2m1l3k5", "the [(2),2,5]x5 distribution"),
];

pub fn run(id: &str, k: Option<usize>) -> ExitCode {
    let print_ssm = |s: usize, m: usize, k: usize| {
        println!("# [{},{},{}]x{}", s, s + m, s + m, k);
        println!("rank\tcount\tsource");
        for i in 0..=k.min(3 * s + 2 * m) {
            let r = gamma_ssm(s, m, k, i).expect("table family covers every rank");
            println!("{i}\t{}\t{} ({})", r.value, r.source, r.validity);
        }
    };
    match id {
        "thm10.9-s2k6" => print_ssm(2, 0, 6),
        "thm10.9-s3k5" => print_ssm(3, 0, 5),
        "thm12.9-s3" => print_ssm(3, 1, k.unwrap_or(12)),
        "thm12.11-s2m2" => print_ssm(2, 2, k.unwrap_or(10)),
        "thm12.11-s3m4k7" => print_ssm(3, 4, 7),
        "thm12.11-s3m4k10" => print_ssm(3, 4, 10),
        "lemma1.22-m1l3" => {
            let k = k.unwrap_or(6);
            if k < 5 {
                eprintln!("the [1,2,5] table needs k >= 5");
                return ExitCode::from(2);
            }
            println!("# [1,2,5]x{k}");
            println!("rank\tcount\tsource");
            for i in 0..=k.min(8) {
                match gamma_s1(1, 3, k, i) {
                    Some(r) => println!("{i}\t{}\t{} ({})", r.value, r.source, r.validity),
                    None => println!("{i}\t?\toutside the stated window"),
                }
            }
        }
        "example-mixed-n2m1l3k5" => {
            let ms = MixedShape::new(2, 1, 3, 5).unwrap();
            let dd = gamma_bruteforce_double(2, 5, 5, 26).expect("13 bits");
            println!("# [(2),2,5]x5");
            println!("rank\tcount\tsource");
            for i in 0..=5 {
                let v = gamma_mixed_from_doubles(&ms, i, &dd).unwrap();
                println!("{i}\t{v}\tdouble-stack combination over enumerated [2,5]x5");
            }
        }
        other => {
            eprintln!("unknown table id: {other}");
            eprintln!("known ids:");
            for (id, what) in IDS {
                eprintln!("  {id:<24} {what}");
            }
            return ExitCode::from(2);
        }
    }
    ExitCode::SUCCESS
}

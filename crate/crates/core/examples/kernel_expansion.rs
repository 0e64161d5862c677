// Symbolic expansion of the kernels M_{n;m}: term counts and the reduction recursion.

use sinhgordon::kernel::{expand_kernel, expected_term_count, normal_multiset, reduce_via_axiom_v};
use sinhgordon::Result;

pub fn run_example() -> Result<()> {
    for term in expand_kernel(1, 1)? {
        println!("M_{{1;1}}: {term}");
    }
    println!("{:>3} {:>3} {:>6} {:>9} {:>10}", "n", "m", "terms", "expected", "recursion");
    for total in 1..=5 {
        for n in 1..=total {
            let m = total - n;
            let closed = expand_kernel(n, m)?;
            let same = normal_multiset(&reduce_via_axiom_v(n, m)?) == normal_multiset(&closed);
            println!("{n:>3} {m:>3} {:>6} {:>9} {:>10}", closed.len(), expected_term_count(n, m), same);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}

pub mod allocate;
pub mod analyze;
pub mod examples;
pub mod info;
pub mod network;
pub mod sumrate;

use intercomp::{FunctionTable, JointPmf};

use crate::error::CliError;

/// Checks that `pmf` has two axes and both functions are defined on them.
pub(crate) fn check_two_terminal(
    pmf: &JointPmf,
    f_a: &FunctionTable,
    f_b: &FunctionTable,
) -> Result<(), CliError> {
    if pmf.num_axes() != 2 {
        return Err(CliError::invalid(
            "pmf",
            format!("expected two axes (X, Y), got {:?}", pmf.axes()),
        ));
    }
    for (name, f) in [("f_A", f_a), ("f_B", f_b)] {
        if f.domain_axes() != pmf.axes() {
            return Err(CliError::invalid(
                name,
                format!(
                    "domain {:?} does not match pmf axes {:?}",
                    f.domain_axes(),
                    pmf.axes()
                ),
            ));
        }
    }
    Ok(())
}

use pyo3::prelude::*;

#[pymodule]
fn semiqsum_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}

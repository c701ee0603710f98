use crate::{Error, Matrix, Result, State};

/// Relative central-difference step; coordinate `i` uses `1e-6·max(1, |x_i|)`.
pub const JACOBIAN_STEP: f64 = 1e-6;

/// Central-difference Jacobian of `map` at `x`.
pub fn numerical_jacobian<F>(map: F, x: &State) -> Result<Matrix>
where
    F: Fn(&State) -> State,
{
    let n = x.len();
    let mut jac: Option<Matrix> = None;
    let mut probe = x.clone();
    for i in 0..n {
        let h = JACOBIAN_STEP * x[i].abs().max(1.0);
        probe[i] = x[i] + h;
        let plus = map(&probe);
        probe[i] = x[i] - h;
        let minus = map(&probe);
        probe[i] = x[i];
        let col = (plus - minus) / (2.0 * h);
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "map is not finite near x[{i}] = {} while differentiating",
                x[i]
            )));
        }
        jac.get_or_insert_with(|| Matrix::zeros(col.len(), n))
            .set_column(i, &col);
    }
    Ok(jac.unwrap_or_else(|| Matrix::zeros(0, 0)))
}

/// Gradient of a scalar function by the same central differences.
pub fn numerical_gradient<F>(f: F, x: &State) -> Result<State>
where
    F: Fn(&State) -> f64,
{
    let row = numerical_jacobian(|y| State::from_element(1, f(y)), x)?;
    Ok(row.row(0).transpose())
}

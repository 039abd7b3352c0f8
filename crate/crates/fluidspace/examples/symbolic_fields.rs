//! Scalar field expressions: parsing, exact differentiation, evaluation.
//!
//! ```bash
//! cargo run --example symbolic_fields
//! ```

use fluidspace::expr::Expr;

fn main() {
    let coords = ["t", "x", "y", "z"].map(String::from);

    // parse a field in the chart coordinates
    let f = Expr::parse("exp(2*t) * (1 + x^2/4) - sin(y)*z", &coords).unwrap();
    let point = [0.3, 1.0, 0.5, -2.0];
    println!("f(0.3, 1, 0.5, -2)      = {}", f.eval(&point));

    // derivatives are exact expression trees, not finite differences
    let df_dt = f.diff(0);
    let d2f_dt2 = df_dt.diff(0);
    println!("df/dt  at the point     = {}", df_dt.eval(&point));
    println!("d2f/dt2 at the point    = {}", d2f_dt2.eval(&point));

    // rendered text parses back to the identical tree
    let rendered = df_dt.render(&coords);
    println!("df/dt rendered          = {rendered}");
    let reparsed = Expr::parse(&rendered, &coords).unwrap();
    assert_eq!(reparsed, df_dt);
    println!("round-trip              = identical tree");

    // the derivative of a constant metric component folds to zero
    let constant = Expr::parse("-1", &coords).unwrap();
    println!("d(-1)/dx                = {:?}", constant.diff(1));
}

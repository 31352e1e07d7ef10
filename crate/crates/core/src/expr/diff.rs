//! Symbolic differentiation with constant folding.
//!
//! The smart constructors below only fold constants and drop neutral
//! elements; they never reorder or factor terms.

use super::{binary_apply, BinOp, Func, Node};

fn is_const(n: &Node, v: f64) -> bool {
    matches!(n, Node::Const(c) if *c == v)
}

fn fold_binary(op: BinOp, l: &Node, r: &Node) -> Option<Node> {
    if let (Node::Const(a), Node::Const(b)) = (l, r) {
        binary_apply(op, *a, *b).ok().map(Node::Const)
    } else {
        None
    }
}

pub(super) fn neg(a: Node) -> Node {
    match a {
        Node::Const(c) => Node::Const(-c),
        Node::Neg(inner) => *inner,
        other => Node::Neg(Box::new(other)),
    }
}

pub(super) fn add(a: Node, b: Node) -> Node {
    if let Some(f) = fold_binary(BinOp::Add, &a, &b) {
        return f;
    }
    if is_const(&a, 0.0) {
        return b;
    }
    if is_const(&b, 0.0) {
        return a;
    }
    Node::binary(BinOp::Add, a, b)
}

pub(super) fn sub(a: Node, b: Node) -> Node {
    if let Some(f) = fold_binary(BinOp::Sub, &a, &b) {
        return f;
    }
    if is_const(&b, 0.0) {
        return a;
    }
    if is_const(&a, 0.0) {
        return neg(b);
    }
    Node::binary(BinOp::Sub, a, b)
}

pub(super) fn mul(a: Node, b: Node) -> Node {
    if let Some(f) = fold_binary(BinOp::Mul, &a, &b) {
        return f;
    }
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        return Node::Const(0.0);
    }
    if is_const(&a, 1.0) {
        return b;
    }
    if is_const(&b, 1.0) {
        return a;
    }
    // c1 * (c2 * e) -> (c1 c2) * e
    if let Node::Const(c1) = a {
        if let Node::Binary(BinOp::Mul, inner_l, inner_r) = &b {
            if let Node::Const(c2) = **inner_l {
                return mul(Node::Const(c1 * c2), (**inner_r).clone());
            }
        }
    }
    Node::binary(BinOp::Mul, a, b)
}

pub(super) fn div(a: Node, b: Node) -> Node {
    if let Some(f) = fold_binary(BinOp::Div, &a, &b) {
        return f;
    }
    if is_const(&b, 1.0) {
        return a;
    }
    if is_const(&a, 0.0) && !matches!(b, Node::Const(_)) {
        return Node::Const(0.0);
    }
    Node::binary(BinOp::Div, a, b)
}

pub(super) fn pow(a: Node, b: Node) -> Node {
    if let Some(f) = fold_binary(BinOp::Pow, &a, &b) {
        return f;
    }
    if is_const(&b, 1.0) {
        return a;
    }
    if is_const(&b, 0.0) {
        return Node::Const(1.0);
    }
    Node::binary(BinOp::Pow, a, b)
}

pub(super) fn call(f: Func, a: Node) -> Node {
    if let Node::Const(c) = a {
        if let Ok(v) = Node::call(f, Node::Const(c)).eval(0.0) {
            return Node::Const(v);
        }
    }
    Node::call(f, a)
}

/// Rebuild `n` bottom-up through the folding constructors, collapsing
/// variable-free subtrees to constants where they evaluate.
pub(super) fn fold(n: &Node) -> Node {
    match n {
        Node::Const(c) => Node::Const(*c),
        Node::Var => Node::Var,
        Node::Neg(a) => neg(fold(a)),
        Node::Binary(op, l, r) => {
            let (l, r) = (fold(l), fold(r));
            match op {
                BinOp::Add => add(l, r),
                BinOp::Sub => sub(l, r),
                BinOp::Mul => mul(l, r),
                BinOp::Div => div(l, r),
                BinOp::Pow => pow(l, r),
            }
        }
        Node::Call(f, a) => call(*f, fold(a)),
    }
}

fn d(n: &Node) -> Node {
    match n {
        Node::Const(_) => Node::Const(0.0),
        Node::Var => Node::Const(1.0),
        Node::Neg(a) => neg(d(a)),
        Node::Binary(op, l, r) => {
            let (u, v) = (fold(l), fold(r));
            match op {
                BinOp::Add => add(d(&u), d(&v)),
                BinOp::Sub => sub(d(&u), d(&v)),
                BinOp::Mul => add(mul(d(&u), v.clone()), mul(u.clone(), d(&v))),
                BinOp::Div => div(
                    sub(mul(d(&u), v.clone()), mul(u.clone(), d(&v))),
                    pow(v, Node::Const(2.0)),
                ),
                BinOp::Pow => {
                    if !v.has_var() {
                        // v u^(v-1) u'
                        let reduced = sub(v.clone(), Node::Const(1.0));
                        mul(mul(v, pow(u.clone(), reduced)), d(&u))
                    } else if !u.has_var() {
                        // u^v ln(u) v'
                        mul(mul(pow(u.clone(), v.clone()), call(Func::Ln, u)), d(&v))
                    } else {
                        // u^v (v' ln u + v u'/u)
                        let tail = add(
                            mul(d(&v), call(Func::Ln, u.clone())),
                            div(mul(v.clone(), d(&u)), u.clone()),
                        );
                        mul(pow(u, v), tail)
                    }
                }
            }
        }
        Node::Call(f, a) => {
            let u = fold(a);
            let du = d(&u);
            let one = || Node::Const(1.0);
            let outer = match f {
                Func::Sqrt => div(one(), mul(Node::Const(2.0), call(Func::Sqrt, u))),
                Func::Exp => call(Func::Exp, u),
                Func::Ln => div(one(), u),
                Func::Sin => call(Func::Cos, u),
                Func::Cos => neg(call(Func::Sin, u)),
                Func::Asin => div(
                    one(),
                    call(Func::Sqrt, sub(one(), pow(u, Node::Const(2.0)))),
                ),
                Func::Acos => neg(div(
                    one(),
                    call(Func::Sqrt, sub(one(), pow(u, Node::Const(2.0)))),
                )),
                Func::Atan => div(one(), add(one(), pow(u, Node::Const(2.0)))),
                // sign(u); undefined at 0
                Func::Abs => div(u.clone(), call(Func::Abs, u)),
            };
            mul(outer, du)
        }
    }
}

pub(super) fn differentiate(n: &Node) -> Node {
    fold(&d(n))
}

#[cfg(test)]
mod tests {
    use crate::expr::Expression;

    fn p(s: &str) -> Expression {
        Expression::parse(s, "x").unwrap()
    }

    #[test]
    fn root_power_derivative_folds_to_inverse_root() {
        let de = p("2*x^(1/2)").derivative();
        assert_eq!(de, p("x^-0.5"));
        assert_eq!(de.eval(4.0).unwrap(), 0.5);
    }

    #[test]
    fn exp_is_its_own_derivative() {
        assert_eq!(p("exp(x)").derivative(), p("exp(x)"));
    }

    #[test]
    fn cubic_slope_at_one() {
        assert_eq!(p("x^3 - x").derivative().eval(1.0).unwrap(), 2.0);
    }

    #[test]
    fn constants_fold() {
        assert_eq!(p("3").derivative(), p("0"));
        assert_eq!(p("x + 5").derivative(), p("1"));
        assert_eq!(p("x * 1").derivative(), p("1"));
    }

    #[test]
    fn abs_derivative_undefined_at_zero() {
        let de = p("abs(x)").derivative();
        assert_eq!(de.eval(-2.0).unwrap(), -1.0);
        assert_eq!(de.eval(3.0).unwrap(), 1.0);
        assert!(de.eval(0.0).is_err());
    }

    #[test]
    fn transcendental_rules() {
        let cases: [(&str, f64, f64); 8] = [
            ("ln(x)", 2.0, 0.5),
            ("sqrt(x)", 4.0, 0.25),
            ("sin(x)", 0.0, 1.0),
            ("cos(x)", 0.0, 0.0),
            ("asin(x)", 0.0, 1.0),
            ("acos(x)", 0.0, -1.0),
            ("atan(x)", 1.0, 0.5),
            ("x^x", 1.0, 1.0),
        ];
        for (s, x, want) in cases {
            let got = p(s).derivative().eval(x).unwrap();
            assert!((got - want).abs() < 1e-15, "{s}: {got} vs {want}");
        }
        let got = p("2^x").derivative().eval(1.0).unwrap();
        assert!((got - 2.0 * 2f64.ln()).abs() < 1e-15);
    }
}

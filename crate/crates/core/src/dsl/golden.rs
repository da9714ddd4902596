//! Golden corpus for the parser: fixed inputs with frozen outcomes.
//!
//! Valid inputs freeze the canonical rendering of the parsed file; invalid
//! inputs freeze the `line:col: message` diagnostic. The corpus pins both
//! the grammar and the diagnostics byte-for-byte; the check command replays
//! it alongside the numeric identities.

use super::parse;

pub struct GoldenCase {
    pub name: &'static str,
    pub input: &'static str,
    /// Canonical rendering for valid inputs, `error <line>:<col>: <message>`
    /// for invalid ones.
    pub expected: &'static str,
}

/// Outcome of running the parser on an input, in the corpus encoding.
pub fn outcome(input: &str) -> String {
    match parse(input) {
        Ok(file) => file.render(),
        Err(err) => format!("error {}", err.render(input)),
    }
}

/// Names of corpus cases whose outcome no longer matches the frozen text.
pub fn failures() -> Vec<&'static str> {
    CORPUS
        .iter()
        .filter(|case| outcome(case.input) != case.expected)
        .map(|case| case.name)
        .collect()
}

pub const CORPUS: &[GoldenCase] = &[
    GoldenCase {
        name: "minimal_dim",
        input: "dim 1",
        expected: "dim 1\n",
    },
    GoldenCase {
        name: "position_field",
        input: "dim 2\nfield F = x1*b1 + x2*b2",
        expected: "dim 2\nfield F = x1 * b1 + x2 * b2\n",
    },
    GoldenCase {
        name: "products_left_associative",
        input: "dim 3\nfield F = b1 ^ b2 * b3 _| b1 |_ b2 . b3",
        expected: "dim 3\nfield F = b1 ^ b2 * b3 _| b1 |_ b2 . b3\n",
    },
    GoldenCase {
        name: "parentheses_override_precedence",
        input: "dim 2\nfield F = x1 * (x2 + 1) ^ (b1 ^ b2)",
        expected: "dim 2\nfield F = x1 * (x2 + 1) ^ (b1 ^ b2)\n",
    },
    GoldenCase {
        name: "unary_minus_folds_into_literals",
        input: "dim 2\nfield F = -2.5*b1 - -x1*b2",
        expected: "dim 2\nfield F = -2.5 * b1 - -x1 * b2\n",
    },
    GoldenCase {
        name: "nested_scalar_functions",
        input: "dim 2\nfield F = sin(cos(x1)) + exp(ln(sqrt(x2 + 2)))",
        expected: "dim 2\nfield F = sin(cos(x1)) + exp(ln(sqrt(x2 + 2)))\n",
    },
    GoldenCase {
        name: "two_argument_functions",
        input: "dim 2\nfield F = pow(x1, 3) * atan2(x2, x1)",
        expected: "dim 2\nfield F = pow(x1, 3) * atan2(x2, x1)\n",
    },
    GoldenCase {
        name: "wedge_chain_blade",
        input: "dim 3\nfield V = exp(x1)*(b1^b2^b3)",
        expected: "dim 3\nfield V = exp(x1) * (b1 ^ b2 ^ b3)\n",
    },
    GoldenCase {
        name: "scalar_product_of_fields",
        input: "dim 2\nfield S = (x1*b1 + x2*b2) . (b1 + b2)",
        expected: "dim 2\nfield S = (x1 * b1 + x2 * b2) . (b1 + b2)\n",
    },
    GoldenCase {
        name: "subtraction_groups_right",
        input: "dim 2\nfield F = x1 - (x2 - x1)",
        expected: "dim 2\nfield F = x1 - (x2 - x1)\n",
    },
    GoldenCase {
        name: "chart_with_domains",
        input: "dim 2\nchart polar {\n  forward: sqrt(x1*x1 + x2*x2), atan2(x2, x1);\n  inverse: x1*cos(x2), x1*sin(x2);\n  domain: [0.5, 2] x [-1.2, 1.2];\n  canonical_domain: [0.5, 1.4] x [-0.9, 0.9];\n}",
        expected: "dim 2\nchart polar {\n  forward: sqrt(x1 * x1 + x2 * x2), atan2(x2, x1);\n  inverse: x1 * cos(x2), x1 * sin(x2);\n  domain: [0.5, 2] x [-1.2, 1.2];\n  canonical_domain: [0.5, 1.4] x [-0.9, 0.9];\n}\n",
    },
    GoldenCase {
        name: "linear_chart_minimal",
        input: "dim 2\nchart shear { forward: x1 + x2, x2; inverse: x1 - x2, x2; }",
        expected: "dim 2\nchart shear {\n  forward: x1 + x2, x2;\n  inverse: x1 - x2, x2;\n}\n",
    },
    GoldenCase {
        name: "extensor_matrix",
        input: "dim 2\nextensor t = [[1 + x1*x1, 0], [x2, 1]]",
        expected: "dim 2\nextensor t = [[1 + x1 * x1, 0], [x2, 1]]\n",
    },
    GoldenCase {
        name: "domain_statement",
        input: "dim 2\ndomain [-2, 2] x [-1, 1]\nfield F = x1",
        expected: "dim 2\ndomain [-2, 2] x [-1, 1]\nfield F = x1\n",
    },
    GoldenCase {
        name: "comments_and_literals",
        input: "dim 2  # two directions\nfield F = 1.5e-3*b1 + 0.25*b2  # trailing comment",
        expected: "dim 2\nfield F = 0.0015 * b1 + 0.25 * b2\n",
    },
    GoldenCase {
        name: "empty_input",
        input: "",
        expected: "error 1:1: a field file must begin with `dim n`, found end of input",
    },
    GoldenCase {
        name: "missing_dim",
        input: "field F = x1",
        expected: "error 1:1: a field file must begin with `dim n`, found `field`",
    },
    GoldenCase {
        name: "dim_out_of_range",
        input: "dim 9",
        expected: "error 1:5: dimension must be an integer between 1 and 8, got 9",
    },
    GoldenCase {
        name: "dim_not_integer",
        input: "dim 2.5",
        expected: "error 1:5: dimension must be an integer between 1 and 8, got 2.5",
    },
    GoldenCase {
        name: "trailing_operator",
        input: "dim 2\nfield F = x1 + ",
        expected: "error 2:14: expected an expression, found end of input",
    },
    GoldenCase {
        name: "unknown_identifier",
        input: "dim 2\nfield F = y1 + x2",
        expected: "error 2:11: unknown identifier `y1` (expected x1..xn, b1..bn, a function, or a number)",
    },
    GoldenCase {
        name: "coordinate_index_out_of_range",
        input: "dim 2\nfield F = x3",
        expected: "error 2:11: coordinate index 3 out of range 1..=2",
    },
    GoldenCase {
        name: "basis_index_zero",
        input: "dim 2\nfield F = b0",
        expected: "error 2:11: basis index 0 out of range 1..=2",
    },
    GoldenCase {
        name: "sin_arity",
        input: "dim 2\nfield F = sin(x1, x2)",
        expected: "error 2:11: sin takes 1 argument, found 2",
    },
    GoldenCase {
        name: "pow_arity",
        input: "dim 2\nfield F = pow(x1)",
        expected: "error 2:11: pow takes 2 arguments, found 1",
    },
    GoldenCase {
        name: "unknown_function",
        input: "dim 2\nfield F = tan(x1)",
        expected: "error 2:11: unknown identifier `tan` (expected x1..xn, b1..bn, a function, or a number)",
    },
    GoldenCase {
        name: "stray_underscore",
        input: "dim 2\nfield F = x1 _ b1",
        expected: "error 2:14: stray `_`: the left contraction operator is `_|`",
    },
    GoldenCase {
        name: "chart_missing_inverse",
        input: "dim 2\nchart c { forward: x1, x2; }",
        expected: "error 2:9: chart block is missing an `inverse` clause",
    },
    GoldenCase {
        name: "extensor_row_too_short",
        input: "dim 2\nextensor t = [[1, 0], [1]]",
        expected: "error 2:24: extensor row must have 2 entries, found 1",
    },
    GoldenCase {
        name: "duplicate_name",
        input: "dim 2\nfield F = x1\nfield F = x2",
        expected: "error 3:7: duplicate name `F`",
    },
];

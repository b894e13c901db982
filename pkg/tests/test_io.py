"""Text and JSON formats: expression grammar, algebra documents, LaTeX."""

import json

import pytest

from lieinv import lie_algebra
from lieinv.algebra import StructureError
from lieinv.expr import coord, expr_str, param, rational, theta
from lieinv.families import builtin_instances, make_g6_38, make_t0
from lieinv.io import (
    ParseError,
    algebra_from_json,
    algebra_to_json,
    bracket_latex,
    expr_latex,
    load_algebra,
    parse_algebra,
    parse_expr,
    render_algebra,
)

SO3_DOC = "dim 3\n[1,2] = e3\n[1,3] = -e2\n[2,3] = e1\n"


class TestExpressionGrammar:
    @pytest.mark.parametrize(
        "text",
        [
            "x1",
            "-3/4",
            "x1*x3 - 1/2*x2^2",
            "th1 + x2^-2",
            "exp(-2*a*atan(x3/x2))",
            "log(x1) + cos(th2)*sin(th2)",
            "(x1 + x2)^3/(x1 - x2)",
            "x1*exp(-1*x2/x1)",
        ],
    )
    def test_parse_print_round_trip(self, text):
        f = parse_expr(text)
        s = expr_str(f)
        again = parse_expr(s)
        assert (f - again).is_zero()
        assert expr_str(again) == s

    def test_round_trip_on_shipped_expressions(self):
        for inst in builtin_instances():
            for f in inst.expected_invariants:
                s = expr_str(f)
                again = parse_expr(s)
                assert (f - again).is_zero(), s
                assert expr_str(again) == s

    def test_round_trip_on_lifted_sets(self):
        for inst in (make_t0(4), make_g6_38()):
            for f in inst.lifted().exprs():
                s = expr_str(f)
                again = parse_expr(s)
                assert (f - again).is_zero(), s

    def test_names_map_to_atom_kinds(self):
        assert parse_expr("x2").equals(coord(2))
        assert parse_expr("th4").equals(theta(4))
        assert parse_expr("alpha").equals(param("alpha"))

    def test_symbols_override(self):
        f = parse_expr("y + x1", symbols={"y": coord(9)})
        assert f.equals(coord(9) + coord(1))

    def test_rational_powers_and_simplification(self):
        assert expr_str(parse_expr("2^3")) == "8"
        assert expr_str(parse_expr("log(x1*x2)")) == "log(x1) + log(x2)"

    @pytest.mark.parametrize(
        "text",
        ["", "x1 +", "((x1)", "foo(x1)", "x1^x2", "1/0", "log(0)", "x1 $ x2"],
    )
    def test_rejects_malformed(self, text):
        with pytest.raises(ParseError):
            parse_expr(text)


class TestAlgebraDocuments:
    def test_parse_well_formed(self):
        g = parse_algebra(SO3_DOC)
        assert g.dim == 3
        assert {k: expr_str(v) for k, v in g.bracket(2, 3).items()} == {1: "1"}
        assert {k: expr_str(v) for k, v in g.bracket(1, 3).items()} == {2: "-1"}

    def test_comments_semicolons_blank_lines(self):
        doc = "# chain algebra\ndim 3; [1,2] = e3\n\n# done\n"
        g = parse_algebra(doc)
        assert g.dim == 3
        assert expr_str(g.bracket(1, 2)[3]) == "1"

    def test_parameters_and_names(self):
        doc = "name twisted\ndim 3\nparam a\n[1,2] = a*e3\n"
        g = parse_algebra(doc)
        assert g.name == "twisted"
        assert g.params == ("a",)
        assert g.bracket(1, 2)[3].equals(param("a"))

    def test_coefficient_grammar(self):
        doc = "dim 4\nparam a\n[1,2] = 2*e3 - e4\n[1,3] = (a + 1)*e4\n"
        g = parse_algebra(doc)
        assert expr_str(g.bracket(1, 2)[3]) == "2"
        assert expr_str(g.bracket(1, 2)[4]) == "-1"
        assert g.bracket(1, 3)[4].equals(param("a") + rational(1))

    @pytest.mark.parametrize(
        "doc,fragment",
        [
            ("dim 3\ndim 4\n[1,2] = e3", "duplicate dim"),
            ("dim 3\n[1,7] = e3", "index out of range"),
            ("dim 3\n[2,2] = e3", "itself"),
            ("dim 3\n[2,1] = e3", "i < j"),
            ("dim 3\n[1,2] = e3\n[1,2] = e3", "duplicate bracket"),
            ("dim 3\n[1,2] = e1*e2", "linear"),
            ("dim 3\n[1,2] = e3/e1", "denominator"),
            ("[1,2] = e3", "before dim"),
        ],
    )
    def test_document_errors_carry_line_numbers(self, doc, fragment):
        with pytest.raises(ParseError) as exc:
            parse_algebra(doc)
        assert "line" in str(exc.value)
        assert fragment in str(exc.value)

    def test_inconsistent_structure_rejected(self):
        with pytest.raises(StructureError) as exc:
            parse_algebra("dim 3\n[1,2] = e3\n[1,3] = e2\n[2,3] = e3")
        assert "jacobi" in str(exc.value)

    def test_render_parse_round_trip(self):
        for inst in builtin_instances():
            g = inst.algebra
            doc = render_algebra(g)
            g2 = parse_algebra(doc)
            assert g2.dim == g.dim
            assert g2.params == g.params
            for i in range(1, g.dim + 1):
                for j in range(i + 1, g.dim + 1):
                    a, b = g.bracket(i, j), g2.bracket(i, j)
                    assert set(a) == set(b)
                    for k in a:
                        assert a[k].equals(b[k])


class TestJson:
    def test_round_trip_with_parameters(self):
        g = make_g6_38().algebra
        payload = algebra_to_json(g)
        assert payload["dim"] == 6 and payload["params"] == ["a"]
        g2 = algebra_from_json(payload)
        assert g2.params == ("a",)
        for i in range(1, 7):
            for j in range(i + 1, 7):
                a, b = g.bracket(i, j), g2.bracket(i, j)
                assert set(a) == set(b)
                for k in a:
                    assert a[k].equals(b[k])

    def test_load_autodetects_format(self):
        blob = json.dumps(algebra_to_json(parse_algebra(SO3_DOC)))
        for source in (SO3_DOC, blob, "  \n" + blob):
            g = load_algebra(source)
            assert g.dim == 3
            assert expr_str(g.bracket(1, 2)[3]) == "1"


class TestLatex:
    def test_expression_forms(self):
        assert (
            expr_latex(parse_expr("x1*x3 - 1/2*x2^2"))
            == "x_{1} x_{3} - \\tfrac{1}{2} x_{2}^{2}"
        )
        out = expr_latex(parse_expr("x1*exp(-2*a*atan(x3/x2))"))
        assert "e^{" in out and "\\arctan" in out

    def test_theta_and_functions(self):
        out = expr_latex(parse_expr("cos(th6)*x2 - sin(th6)*x3"))
        assert "\\cos" in out and "\\sin" in out and "\\theta_{6}" in out
        assert "\\ln" in expr_latex(parse_expr("log(x1)"))

    def test_bracket_relations(self):
        g = parse_algebra(SO3_DOC)
        assert bracket_latex(g) == [
            "[e_{1},e_{2}] = e_{3}",
            "[e_{1},e_{3}] = -e_{2}",
            "[e_{2},e_{3}] = e_{1}",
        ]

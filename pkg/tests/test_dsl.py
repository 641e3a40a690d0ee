from fractions import Fraction

import pytest

from varbic.dsl import DSLError, parse_polynomial, parse_program, parse_vector_field, polynomial_to_text


def test_rotation_field():
    spec = parse_vector_field("vec v [x2, -x1]", 2)
    assert not spec.formal
    assert spec.components == ({(0, 1): Fraction(1)}, {(1, 0): Fraction(-1)})


def test_formal_field():
    spec = parse_vector_field("formal w", 3)
    assert spec.formal and spec.name == "w"


def test_rationals_and_powers():
    poly = parse_polynomial("x1^2/2 - 3/4*x2 + (x1 + 1)^2", ["x1", "x2"])
    assert poly == {(2, 0): Fraction(3, 2), (0, 1): Fraction(-3, 4), (1, 0): Fraction(2), (0, 0): Fraction(1)}
    assert polynomial_to_text(poly, ["x1", "x2"]) == "3/2*x1^2 + 2*x1 - 3/4*x2 + 1"


def test_program_with_comments():
    specs = parse_program("# fields\nvec a [1, 0]; formal b\n\nvec c [x1*x2, x2^3]\n", 2)
    assert [s.name for s in specs] == ["a", "b", "c"]


@pytest.mark.parametrize("text,fragment,column", [
    ("vec v [x1]", "1 components", 7),
    ("vec v [1.5, x1]", "non-rational literal", 8),
    ("vec v [x1 + , 2]", "expected a number", 13),
    ("vec v [x3, x1]", "unknown variable 'x3'", 8),
    ("vec v [x1/x2, 1]", "division is only allowed", 11),
    ("vec v [x1^-1, 1]", "exponent", 11),
    ("vec v [1/0, 1]", "division by zero", 10),
    ("field v", "expected 'vec' or 'formal'", 1),
])
def test_errors_report_position(text, fragment, column):
    with pytest.raises(DSLError) as exc:
        parse_vector_field(text, 2)
    assert fragment in str(exc.value)
    assert exc.value.line == 1
    assert exc.value.column == column


def test_error_line_numbers():
    with pytest.raises(DSLError) as exc:
        parse_program("formal a\nvec b [x1, $]", 2)
    assert exc.value.line == 2


def test_duplicate_names():
    with pytest.raises(DSLError):
        parse_program("formal a; formal a", 2)

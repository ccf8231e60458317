import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paraground.builtins import BuiltinTable
from paraground.frontend import ParseError, has_errors, parse_program, read_terms, tokenize, validate
from paraground.terms import NIL, Clause, Int, Struct, Var, atom, make_list, term_to_str

from helpers import CORPUS


def one(text):
    [(t, _)] = read_terms(text)
    return t


def test_single_fact():
    prog = parse_program(":- main(r/2).\nr([],[]).")
    assert len(prog.clauses) == 1
    c = prog.clauses[0]
    assert c.head == Struct("r", (NIL, NIL))
    assert c.body == ()
    assert prog.goal == ("r", 2)
    assert prog.parametric is False


def test_quicksort_listing():
    prog = parse_program((CORPUS / "qs.pl").read_text())
    assert len(prog.clauses) == 9
    assert len(prog.directives) == 2
    assert prog.goal == ("qs", 2)
    assert prog.parametric is True


def test_missing_final_dot():
    with pytest.raises(ParseError, match="end of input"):
        parse_program(":- main(p/1).\np(X) :- q(X)")


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_program(":- main(p/1).\np(X) :- q(X,.\n")
    assert info.value.line == 2
    assert info.value.col > 0


def test_comments_stripped():
    text = "% line comment\n:- main(p/0). /* block\n comment */ p. % trailing\n"
    prog = parse_program(text)
    assert [c.head for c in prog.clauses] == [atom("p")]


@pytest.mark.parametrize(
    "text, message",
    [
        ("p.", "missing main"),
        (":- main(p/0). :- main(p/0). p.", "main"),
        (":- main(p/0). :- parametric(yes). :- parametric(no). p.", "parametric"),
        (":- main(p/0). :- foo. p.", "unknown directive"),
    ],
)
def test_directive_errors(text, message):
    with pytest.raises(ParseError, match=message):
        parse_program(text)


def test_parametric_defaults_to_no():
    assert parse_program(":- main(p/0). p.").parametric is False
    assert parse_program(":- main(p/0). :- parametric(no). p.").parametric is False


def test_list_desugaring():
    assert one("'.'(a,'[]').") == one("[a].")
    assert one("[a,b|T].") == Struct(".", (atom("a"), Struct(".", (atom("b"), Var("T")))))
    assert one("[].") == NIL


def test_operators_and_integers():
    assert one("X is Y + 1 * 2.") == Struct(
        "is", (Var("X"), Struct("+", (Var("Y"), Struct("*", (Int(1), Int(2))))))
    )
    assert one("1 - 2 - 3.") == Struct("-", (Struct("-", (Int(1), Int(2))), Int(3)))
    assert one("f(-1).") == Struct("f", (Int(-1),))
    assert one("a - -1.") == Struct("-", (atom("a"), Int(-1)))


def test_anonymous_variables_are_distinct():
    t = one("p(_, _, G1).")
    a, b, c = t.args
    assert isinstance(a, Var) and isinstance(b, Var)
    assert a != b and c == Var("G1")


def test_tokenizer_end_token():
    toks = tokenize("p :- q. r. % done")
    assert sum(1 for t in toks if t.kind == "end") == 2


# -- validation --------------------------------------------------------------------


def test_quicksort_validates_cleanly():
    prog = parse_program((CORPUS / "qs.pl").read_text())
    builtins = {("=", 2), ("=<", 2), (">", 2), ("is", 2)}
    assert validate(prog, builtins) == []


@pytest.mark.parametrize(
    "body, message",
    [
        ("\\+ q(X)", "unsupported construct: negation"),
        ("q(X), !", "unsupported construct: cut"),
        ("(q(X) ; q(X))", "unsupported construct: disjunction"),
        ("(q(X) -> q(X))", "unsupported construct: if-then-else"),
        ("assert(q(1))", "unsupported construct: assert"),
    ],
)
def test_unsupported_constructs(body, message):
    prog = parse_program(f":- main(p/1).\np(X) :- {body}.\nq(1).")
    diags = validate(prog, BuiltinTable.default())
    assert has_errors(diags)
    assert any(d.message == message and d.kind == "unsupported" for d in diags)


def test_goal_arity_mismatch():
    text = (CORPUS / "qs.pl").read_text().replace("main(qs/2)", "main(qs/3)")
    diags = validate(parse_program(text), BuiltinTable.default())
    assert any(d.message.startswith("goal arity mismatch") for d in diags)


def test_undefined_predicate():
    diags = validate(parse_program(":- main(p/1). p(X) :- q(X)."), BuiltinTable.default())
    assert [d.message for d in diags] == ["undefined predicate q/1"]


def test_redefining_builtin():
    diags = validate(parse_program(":- main(p/0). p. X = X."), BuiltinTable.default())
    assert any("redefinition of builtin" in d.message for d in diags)


def test_goal_without_clauses_is_warning():
    diags = validate(parse_program(":- main(p/1). q(a)."), BuiltinTable.default())
    assert diags and not has_errors(diags)


# -- printing and re-reading -----------------------------------------------------------

_names = st.sampled_from(["a", "foo", "nil", "x1", "hello world", "It's", "[]", "+", "-", "is", "f"])
_vars = st.sampled_from(["X", "Y", "Tail", "_A"]).map(Var)
_ints = st.integers(-50, 50).map(Int)


def _terms():
    leaves = st.one_of(_vars, _ints, _names.map(atom))

    def extend(children):
        return st.one_of(
            st.builds(lambda f, args: Struct(f, tuple(args)), _names, st.lists(children, min_size=1, max_size=3)),
            st.builds(lambda xs, tail: make_list(xs, tail), st.lists(children, max_size=3), st.one_of(st.just(NIL), _vars)),
            st.builds(
                lambda op, a, b: Struct(op, (a, b)),
                st.sampled_from(["=", "is", "+", "-", "*", "=<", "mod", "//"]),
                children,
                children,
            ),
            st.builds(lambda a: Struct("-", (a,)), children),
        )

    return st.recursive(leaves, extend, max_leaves=8)


@settings(max_examples=300, deadline=None)
@given(_terms())
def test_term_print_read_round_trip(t):
    assert one(term_to_str(t) + " .") == t


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(_terms(), st.lists(_terms(), max_size=3)), min_size=1, max_size=4))
def test_program_round_trip(raw):
    clauses = []
    for head, body in raw:
        if not isinstance(head, Struct):
            head = Struct("h", (head,))
        goals = tuple(g if isinstance(g, Struct) else Struct("g", (g,)) for g in body)
        clauses.append(Clause(head, goals))
    text = "\n".join(
        term_to_str(c.head) + (" :- " + ", ".join(term_to_str(g) for g in c.body) if c.body else "") + "."
        for c in clauses
    )
    prog = parse_program(":- main(h/1).\n" + text)
    again = parse_program(prog.to_text())
    assert again.clauses == prog.clauses
    assert [(c.head, c.body) for c in prog.clauses] == [(c.head, c.body) for c in clauses]


def test_corpus_round_trips():
    for path in sorted(CORPUS.glob("*.pl")):
        prog = parse_program(path.read_text())
        again = parse_program(prog.to_text())
        assert again.clauses == prog.clauses
        assert again.goal == prog.goal and again.parametric == prog.parametric

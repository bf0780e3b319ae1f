"""
Hypothesis strategies for random words on the built-in quivers.

On the one-loop double every letter is a loop at ``o``, so any sequence of
letters is a composable word.
"""
from hypothesis import strategies as st

from ncpn.forms import Derivation, FormWord
from ncpn.polyvec import DoubledPoly, necklace_normalize
from ncpn.quiver import PathPoly, word_degree
from ncpn.registry import cm_quiver, gh_quiver

ARROWS = ("a", "a^")
COEFFICIENTS = st.integers(min_value=-3, max_value=3).filter(bool)


def _word(letters):
    quiver = cm_quiver()
    return tuple(letters) if letters else quiver.trivial_word("o")


def cm_paths(max_length=3):
    """Path polynomials on the one-loop double."""
    quiver = cm_quiver()
    words = st.lists(st.sampled_from(ARROWS), max_size=max_length).map(
        lambda names: _word([quiver.arrow_symbol(n) for n in names])
    )
    return st.lists(st.tuples(words, COEFFICIENTS), min_size=1, max_size=3).map(
        lambda terms: PathPoly(quiver, terms)
    )


def cm_forms(max_length=4, max_degree=None):
    """Form words mixing arrows and differentials on the one-loop double."""
    quiver = cm_quiver()
    letters = st.sampled_from(
        [quiver.arrow_symbol(n) for n in ARROWS] + [quiver.diff_symbol(n) for n in ARROWS]
    )
    words = st.lists(letters, min_size=1, max_size=max_length).map(tuple)
    if max_degree is not None:
        words = words.filter(lambda word: word_degree(word) <= max_degree)
    return st.lists(st.tuples(words, COEFFICIENTS), min_size=1, max_size=3).map(
        lambda terms: FormWord(quiver, terms)
    )


def cm_derivations(max_length=3):
    """Derivations of the one-loop double with random images on a and a^."""
    quiver = cm_quiver()
    return st.tuples(cm_paths(max_length), cm_paths(max_length)).map(
        lambda images: Derivation(quiver, dict(zip(ARROWS, images)))
    )


def cm_necklaces(grade, max_length=4):
    """Grade-homogeneous polyvectors in necklace normal form."""
    quiver = cm_quiver()
    arrows = st.lists(
        st.sampled_from([quiver.arrow_symbol(n) for n in ARROWS]),
        max_size=max(max_length - grade, 0),
    )
    vectors = st.lists(
        st.sampled_from([quiver.vector_symbol(n) for n in ARROWS]),
        min_size=grade,
        max_size=grade,
    )
    words = st.tuples(arrows, vectors).flatmap(
        lambda pair: st.permutations(pair[0] + pair[1])
    ).map(_word)
    return st.lists(st.tuples(words, COEFFICIENTS), min_size=1, max_size=2).map(
        lambda terms: necklace_normalize(DoubledPoly(quiver, terms))
    )


def gh_paths(max_length=4):
    """Path polynomials on the framed double; incomposable draws vanish."""
    quiver = gh_quiver()
    names = st.lists(st.sampled_from(quiver.arrow_names), min_size=1, max_size=max_length)
    monomials = st.tuples(names, COEFFICIENTS).map(
        lambda pair: quiver.path(*pair[0]).scale(pair[1])
    )
    return st.lists(monomials, min_size=1, max_size=3).map(
        lambda polys: sum(polys[1:], polys[0])
    )

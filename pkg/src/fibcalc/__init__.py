"""Fibrations over products of finite categories: classification,
straightening and dualisation, parametrised adjunctions and their mates,
twisted arrows and correspondences, and Gray tensor combinatorics."""
from .errors import FibcalcError
from .fibclass import TwoVarFib, classify, fib_from_json, fib_to_json
from .fincat import FinCat, FinFunctor, NatTransf, Adjunction, find_adjoint, from_json
from .grothendieck import dualize, fib_equivalent, straighten, unstraighten

__version__ = "0.1.0"

__all__ = [
    "FibcalcError", "TwoVarFib", "classify", "fib_from_json", "fib_to_json", "FinCat",
    "FinFunctor", "NatTransf", "Adjunction", "find_adjoint", "from_json", "dualize",
    "fib_equivalent", "straighten", "unstraighten",
]

from tate_derham.algebra.scalars import EXACT, LaurentScalar, PrecisionBound
from tate_derham.algebra.tate import TateElement
from tate_derham.algebra.weyl import Symbol, WeylOperator

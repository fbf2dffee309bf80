from fractions import Fraction

from .cpoly import Poly
from .cscalar import I
from .expr import Node
from .visitor import Visitor


class PolyBuilderVisitor(Visitor):
    """Folds an expression tree into a canonical Poly."""

    def __init__(self, nvars: int) -> None:
        self.nvars = nvars

    def visit_number(self, node):
        return Poly.constant(node.value, self.nvars)

    def visit_imag_unit(self, node):
        return Poly.constant(I, self.nvars)

    def visit_var(self, node):
        return Poly.var(node.index, self.nvars, barred=node.barred)

    def visit_add(self, node):
        return self.visit_child(node.left) + self.visit_child(node.right)

    def visit_sub(self, node):
        return self.visit_child(node.left) - self.visit_child(node.right)

    def visit_mul(self, node):
        return self.visit_child(node.left) * self.visit_child(node.right)

    def visit_pow(self, node):
        return self.visit(node.base) ** node.exponent

    def visit_neg(self, node):
        return -self.visit(node.operand)

    def visit_re(self, node):
        inner = self.visit(node.operand)
        return (inner + inner.conjugate()).scale(Fraction(1, 2))

    def visit_im(self, node):
        inner = self.visit(node.operand)
        return (inner - inner.conjugate()) * Poly.constant(-I / 2, self.nvars)

    def visit_abs2(self, node):
        inner = self.visit(node.operand)
        return inner * inner.conjugate()

    def visit_conj(self, node):
        return self.visit(node.operand).conjugate()


def build_poly(tree: Node, nvars: int) -> Poly:
    return PolyBuilderVisitor(nvars).visit(tree)

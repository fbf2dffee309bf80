# https://github.com/mbr/visitor
class Visitor:
    """Base class for visitors over expression trees."""

    def visit(self, node):
        """Visit a node.

        Dispatch to a visit_foo if the node's OP is foo. Visitors return
        the folded value of the subtree.
        """
        if node is None:
            return None
        name = node.OP.name.lower()
        meth = getattr(self, "visit_" + name, None)
        if meth is None:
            return self.generic_visit(node)
        return meth(node)

    def visit_child(self, child):
        """To be called whenever a node with multiple children
        needs to visit children. Compared to visit(), this can
        do cleanup work that needs to be scheduled after each
        child."""
        result = self.visit(child)
        self.finish()
        return result

    def finish(self):
        """Any cleanup work to be done after visit_child."""

    def generic_visit(self, node):
        raise NotImplementedError(f"{type(self).__name__} has no visit_{node.OP.name.lower()}")

from dataclasses import dataclass, fields


def node(cls):
    """Frozen dataclass whose structural hash is computed once.

    Formula trees are used heavily as dict keys (memo tables), so recomputing
    a deep hash on every lookup would dominate run time.
    """
    cls = dataclass(frozen=True)(cls)
    names = tuple(f.name for f in fields(cls))
    tag = cls.__qualname__

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = hash((tag, *(getattr(self, n) for n in names)))
            object.__setattr__(self, "_h", h)
        return h

    def __eq__(self, other):
        if self is other:
            return True
        if other.__class__ is not self.__class__:
            return NotImplemented
        if hash(self) != hash(other):
            return False
        if not all(getattr(self, n) == getattr(other, n) for n in names):
            return False
        # equal values: share the children so later comparisons stop at identity
        for n in names:
            object.__setattr__(other, n, getattr(self, n))
        return True

    cls.__hash__ = __hash__
    cls.__eq__ = __eq__
    return cls

from . import fo, lfd
from .fo import Guardedness, is_guarded
from .lfd import closure, single_negation
from .signature import Signature, format_signature, parse_signature
from .text import fo_to_text, lfd_to_text, parse_fo, parse_lfd

free_vars_lfd = lfd.free_vars
free_vars_fo = fo.free_vars

__all__ = [
    "Guardedness", "Signature", "closure", "fo", "fo_to_text", "format_signature",
    "free_vars_fo", "free_vars_lfd", "is_guarded", "lfd", "lfd_to_text", "parse_fo",
    "parse_lfd", "parse_signature", "single_negation",
]

"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback is used.  Setting ``RELCLASS_PURE=1`` forces the fallback.
"""
import os

from . import _pykernels

if os.environ.get("RELCLASS_PURE", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND

sieve_odd_segment = _impl.sieve_odd_segment
squarefree_segment = _impl.squarefree_segment
dirichlet_convolve = _impl.dirichlet_convolve
reduce_form = _impl.reduce_form
compose_forms = _impl.compose_forms
reduced_forms = _impl.reduced_forms
class_group_orders = _impl.class_group_orders


def backends():
    """Available backend modules, fallback first."""
    mods = [_pykernels]
    try:
        from . import _ckernels
    except ImportError:
        return mods
    mods.append(_ckernels)
    return mods

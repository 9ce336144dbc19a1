"""Kernel backend selection.

Two interchangeable backends provide the numerical hot paths: a compiled
Cython module and a pure-Python reference.  The compiled one is used when
importable; SARGSC_KERNELS=python or =compiled forces the choice.
"""

import os

from . import pykernels

_choice = os.environ.get("SARGSC_KERNELS", "auto").strip().lower()

if _choice not in {"auto", "compiled", "python"}:
    raise ImportError(
        f"SARGSC_KERNELS must be auto, compiled or python, got {_choice!r}"
    )

if _choice == "python":
    impl = pykernels
else:
    try:
        from . import _ckernels as impl
    except ImportError:
        if _choice == "compiled":
            raise ImportError(
                "SARGSC_KERNELS=compiled but the compiled kernels are not "
                "available; reinstall with a C toolchain present"
            )
        impl = pykernels

CODE_OK = pykernels.CODE_OK
CODE_CAP = pykernels.CODE_CAP
CODE_FAILED = pykernels.CODE_FAILED


def backend_name():
    """Name of the kernel backend in use: 'compiled' or 'python'."""
    return impl.NAME

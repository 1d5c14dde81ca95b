# Copyright dtnres contributors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
"""Scattering resonances via a DtN nonlinear eigenvalue problem."""

from ._core import (
    DtnNep,
    Error,
    backward_error,
    build_problem,
    derivative_table,
    find_poles,
    hankel1,
    hankel_vector,
    newton_resonance,
    reference_table,
    solve,
)

__all__ = [
    "DtnNep",
    "Error",
    "backward_error",
    "build_problem",
    "derivative_table",
    "find_poles",
    "hankel1",
    "hankel_vector",
    "newton_resonance",
    "reference_table",
    "solve",
]

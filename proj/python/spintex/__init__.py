# Copyright 2026 The spintex Authors
# SPDX-License-Identifier: Apache-2.0
"""Spin textures on rotating two-dimensional ion crystals."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401

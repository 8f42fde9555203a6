# Sphinx configuration for the gblab documentation.
#
# Options reference: https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys

sys.path.insert(0, os.path.abspath("../.."))

from gblab import __version__  # noqa: E402

# -- Project -----------------------------------------------------------------

project = "gblab"
copyright = "2026, the gblab authors"
author = "the gblab authors"
version = ".".join(__version__.split(".")[:2])
release = __version__

# -- General -----------------------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.coverage",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
]

# Docstrings use Google sections; numpy-style sections are not used anywhere.
napoleon_google_docstring = True
napoleon_numpy_docstring = False

autodoc_member_order = "bysource"
autodoc_typehints = "description"
autodoc_default_options = {
    "members": True,
    "show-inheritance": True,
}

templates_path = ["_templates"]
exclude_patterns: list[str] = []
master_doc = "index"

# -- HTML output -------------------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_title = f"gblab {release}"
html_theme_options = {
    "navigation_depth": 2,
    "collapse_navigation": False,
}
html_static_path: list[str] = []

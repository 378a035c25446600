#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# orlicz documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
import re
import sys

# If extensions (or modules to document with autodoc) are in another directory,
# add these directories to sys.path here.
sys.path.append(os.path.abspath(".."))

# -- General configuration ------------------------------------------------

# If your documentation needs a minimal Sphinx version, state it here.
needs_sphinx = "3.1.0"

extensions = [
    "m2r2",
    "sphinx_copybutton",
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
    "sphinx.ext.todo",
    "sphinx.ext.viewcode",
]

autosummary_generate = True
autosummary_imported_members = True

# Tell sphinx what the primary language being documented is.
primary_domain = "py"

# Tell sphinx what the pygments highlight language should be.
highlight_language = "py"

# The suffix(es) of source filenames.
source_suffix = [".rst", ".md"]

# The master toctree document.
master_doc = "index"

# General information about the project.
project = "orlicz"
copyright = "2026, the orlicz developers"
author = "the orlicz developers"

# The full version, including alpha/beta/rc tags.
import orlicz

release = orlicz.__version__

# The short X.Y version.
version = re.match(r"\d+\.\d+", release).group(0)

language = "en"

today_fmt = "%Y-%m-%d"

# List of patterns, relative to source directory, that match files and
# directories to ignore when looking for source files.
exclude_patterns = ["_build"]

# If true, '()' will be appended to :func: etc. cross-reference text.
add_function_parentheses = True

# If true, the current module name will be prepended to all description
# unit titles (such as .. function::).
add_module_names = False

# The name of the Pygments (syntax highlighting) style to use.
pygments_style = "sphinx"

# If true, `todo` and `todoList` produce output, else they produce nothing.
todo_include_todos = True

# -- Options for HTML output ----------------------------------------------

html_theme = "alabaster"

html_sidebars = {
    "**": [
        "searchbox.html",
        "globaltoc.html",
    ]
}

# Output file base name for HTML help builder.
htmlhelp_basename = "orliczdoc"

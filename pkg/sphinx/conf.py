# Configuration file for the Sphinx documentation builder.
#
# Only the options that differ from the sphinx-quickstart defaults are set here.
# Full list: http://www.sphinx-doc.org/en/master/config

import os
import sys
sys.path.insert(0, os.path.abspath('..'))
sys.path.insert(0, os.path.abspath('../symmean'))


# -- Project information -----------------------------------------------------

project = 'symmean'
copyright = '2026, symmean contributors'
author = 'symmean contributors'

version = '0.1'
release = '0.1.0'


# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'
language = 'en'
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = None

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable', None),
}


# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
htmlhelp_basename = 'symmeandoc'


# -- Options for LaTeX output ------------------------------------------------

latex_documents = [
    (master_doc, 'symmean.tex', 'symmean Documentation', author, 'manual'),
]


# -- Options for manual page output ------------------------------------------

man_pages = [
    (master_doc, 'symmean', 'symmean Documentation', [author], 1)
]

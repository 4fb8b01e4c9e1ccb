"""
Setup script for the gravcorr tools.
"""

import setuptools


# The easiest way to convert the markdown to RestructuredText is to use
# pandoc.  There is a Python frontend to that package called pypandoc.
# To use this code you will need to :
#   1. Download and install pandoc  (http://pandoc.org/installing.html)
#   2. pip install pypandoc
try:
    import pypandoc
    LONG_DESCRIPTION = pypandoc.convert_file(source_file='README.md',
                                             format='markdown_github',
                                             to='rst',
                                             extra_args=['-s', '--columns=1000'])
except (IOError, ImportError):
    LONG_DESCRIPTION = ''

setuptools.setup(
    name='gravcorr',
    version='0.1.0',
    description=('Gravity-mediated quantum correlation and entanglement '
                 'between optomechanical cavities'),
    license='BSD',
    long_description=LONG_DESCRIPTION,
    keywords='optomechanics gravity quantum correlation entanglement',
    python_requires='>=3.7',
    install_requires=['numpy', 'scipy', 'python-dateutil',
                      'tomli; python_version < "3.11"'],
    classifiers=[
        'Development Status :: 4 - Beta',
        'Topic :: Scientific/Engineering :: Physics',
        'License :: OSI Approved :: BSD License',
    ],
    packages=['gravcorr'],
    scripts=['gcorr.py'],
    test_suite='test'
)

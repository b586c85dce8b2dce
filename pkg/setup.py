import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
     name='LagDisp',
     version='0.1.0',
     description="Spectral numerics for the harmonic oscillator with an "
                 "inverse square potential",
     include_package_data=True,
     package_data={"lagdisp": ["configuration.yaml"]},
     long_description=long_description,
     long_description_content_type="text/markdown",
     install_requires=['numpy', 'scipy', 'pyyaml'],
     packages=setuptools.find_packages(include=["lagdisp", "lagdisp.*"]),
     entry_points={
         "console_scripts": ["lagdisp=lagdisp.interface.cli:main"],
     },
     classifiers=[
         "Programming Language :: Python :: 3",
         "Operating System :: OS Independent",
     ],
 )

"""novikov-lab command-line interface: commands, pipelines, artifacts and console reports"""

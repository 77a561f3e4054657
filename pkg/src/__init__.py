"""novikov-lab: conservative Novikov solutions, peakon collisions and Finsler transport costs"""
__version__ = "0.1.0"

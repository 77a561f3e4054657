"""Multi-peakon dynamics"""

"""Novikov evolution in x-coordinates for smooth data"""

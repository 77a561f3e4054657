"""Conserved energies and concentration analysis"""

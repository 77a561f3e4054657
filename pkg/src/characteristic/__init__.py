"""Characteristic coordinates and the semi-linear solver"""

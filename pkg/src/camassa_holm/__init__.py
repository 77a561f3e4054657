"""Camassa-Holm analog of the tangent machinery"""

"""Finsler transport cost, tangent transport and distance bounds"""

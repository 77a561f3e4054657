"""Experiment configuration"""

"""Numerical core of Cartan Synthesis"""
